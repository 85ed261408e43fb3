//! Maximin Latin hypercube designs in a chart rectangle, snapped to mesh nodes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;

use super::{Chart, MeshError, TriangleMesh};

#[derive(Debug, Clone)]
pub struct DesignOptions {
    /// Independent random starts; the best design over all starts is kept.
    pub restarts: usize,
    /// Column-swap proposals per start; `None` picks a budget from `n`.
    pub iterations: Option<usize>,
    /// Nodes allowed in the design (`None`: all).
    pub candidates: Option<Vec<bool>>,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self { restarts: 5, iterations: None, candidates: None }
    }
}

/// Chart-unit geometry of the design rectangle.
struct Rect {
    lo: [f64; 2],
    width: [f64; 2],
    periodic: [bool; 2],
}

impl Rect {
    fn dist2(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let mut s = 0.0;
        for d in 0..2 {
            let mut delta = (a[d] - b[d]).abs();
            if self.periodic[d] {
                delta = delta.min(1.0 - delta);
            }
            let x = delta * self.width[d];
            s += x * x;
        }
        s
    }
}

/// Morris–Mitchell criterion `(Σ d_ij^{-p})^{1/p}` with `p = 20` (smaller is
/// better) together with the minimum pairwise distance.
fn criterion(rect: &Rect, pts: &[[f64; 2]]) -> (f64, f64) {
    const P: i32 = 20;
    let mut phi = 0.0;
    let mut dmin = f64::INFINITY;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = rect.dist2(pts[i], pts[j]).sqrt().max(1e-300);
            dmin = dmin.min(d);
            phi += d.powi(-P);
        }
    }
    (phi.powf(1.0 / P as f64), dmin)
}

fn random_lhs(n: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let mut cols: [Vec<usize>; 2] = [(0..n).collect(), (0..n).collect()];
    cols.iter_mut().for_each(|c| c.shuffle(rng));
    (0..n)
        .map(|i| {
            let u0: f64 = rng.random();
            let u1: f64 = rng.random();
            [(cols[0][i] as f64 + u0) / n as f64, (cols[1][i] as f64 + u1) / n as f64]
        })
        .collect()
}

fn lhs_in_rect(n: usize, rect: &Rect, seed: u64, opts: &DesignOptions) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let iterations = opts.iterations.unwrap_or_else(|| (20_000_000 / (n * n).max(1)).clamp(50, 2000));
    let mut best: Option<(Vec<[f64; 2]>, f64, f64)> = None;
    for _ in 0..opts.restarts.max(1) {
        let mut pts = random_lhs(n, &mut rng);
        let (mut phi, mut dmin) = criterion(rect, &pts);
        if n >= 2 {
            for _ in 0..iterations {
                let d = rng.random_range(0..2);
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                if i == j {
                    continue;
                }
                let (a, b) = (pts[i][d], pts[j][d]);
                pts[i][d] = b;
                pts[j][d] = a;
                let (p2, d2) = criterion(rect, &pts);
                if p2 < phi {
                    phi = p2;
                    dmin = d2;
                } else {
                    pts[i][d] = a;
                    pts[j][d] = b;
                }
            }
        }
        let better = match &best {
            None => true,
            Some((_, bd, bp)) => dmin > *bd || (dmin == *bd && phi < *bp),
        };
        if better {
            best = Some((pts, dmin, phi));
        }
    }
    let pts = best.map(|b| b.0).unwrap_or_default();
    pts.into_iter().map(|p| [rect.lo[0] + p[0] * rect.width[0], rect.lo[1] + p[1] * rect.width[1]]).collect()
}

/// Maximin Latin hypercube of `n` points in the chart rectangle of `chart`,
/// distances measured in chart units with periodic coordinates wrapped.
pub fn maximin_lhs<T: Real>(chart: &Chart<T>, n: usize, seed: u64, opts: &DesignOptions) -> Vec<[T; 2]> {
    let rect = rect_of(chart);
    lhs_in_rect(n, &rect, seed, opts).into_iter().map(|p| p.map(T::lit)).collect()
}

fn rect_of<T: Real>(chart: &Chart<T>) -> Rect {
    let lo = [chart.bounds[0][0].as_f64(), chart.bounds[1][0].as_f64()];
    let width = [chart.bounds[0][1].as_f64() - lo[0], chart.bounds[1][1].as_f64() - lo[1]];
    Rect { lo, width, periodic: chart.periodic }
}

/// `n` distinct nodes: a maximin LHS in the chart rectangle, each point snapped
/// to the nearest free node (wrapped chart distance).
pub fn maximin_node_design<T: Real>(
    mesh: &TriangleMesh<T>,
    n: usize,
    seed: u64,
    opts: &DesignOptions,
) -> Result<Vec<usize>, MeshError> {
    let chart = mesh.chart().ok_or(MeshError::MissingChart)?;
    let m = mesh.num_vertices();
    let allowed: Vec<bool> = match &opts.candidates {
        Some(mask) if mask.len() != m => {
            return Err(MeshError::Design(format!("candidate mask has {} entries for {m} nodes", mask.len())))
        }
        Some(mask) => mask.clone(),
        None => vec![true; m],
    };
    let available = allowed.iter().filter(|&&a| a).count();
    if n == 0 {
        return Err(MeshError::Design("design size must be at least 1".into()));
    }
    if n > available {
        return Err(MeshError::Design(format!("requested {n} nodes but only {available} are available")));
    }
    if n == available {
        return Ok((0..m).filter(|&j| allowed[j]).collect());
    }
    let rect = rect_of(chart);
    let points = lhs_in_rect(n, &rect, seed, opts);
    let coords: Vec<[f64; 2]> = chart.coords.iter().map(|c| [c[0].as_f64(), c[1].as_f64()]).collect();
    let mut taken = allowed.iter().map(|&a| !a).collect::<Vec<bool>>();
    let mut out = Vec::with_capacity(n);
    for p in points {
        let mut best = (usize::MAX, f64::INFINITY);
        for (j, c) in coords.iter().enumerate() {
            if taken[j] {
                continue;
            }
            let d = chart_dist2(chart, p, *c);
            if d < best.1 {
                best = (j, d);
            }
        }
        taken[best.0] = true;
        out.push(best.0);
    }
    Ok(out)
}

fn chart_dist2<T: Real>(chart: &Chart<T>, a: [f64; 2], b: [f64; 2]) -> f64 {
    let mut s = 0.0;
    for d in 0..2 {
        let mut delta = (a[d] - b[d]).abs();
        if let Some(p) = chart.period(d) {
            let p = p.as_f64();
            delta %= p;
            delta = delta.min(p - delta);
        }
        s += delta * delta;
    }
    s
}

/// Smallest wrapped chart distance between two distinct design nodes.
pub fn min_pairwise_chart_distance<T: Real>(chart: &Chart<T>, nodes: &[usize]) -> T {
    let mut best = T::max_value().unwrap();
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            best = best.min(chart.distance(chart.coords[nodes[i]], chart.coords[nodes[j]]));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_cylinder_mesh;

    #[test]
    fn lhs_has_one_point_per_stratum() {
        let rect = Rect { lo: [0.0, 0.0], width: [1.0, 1.0], periodic: [false, false] };
        let pts = lhs_in_rect(12, &rect, 3, &DesignOptions::default());
        for d in 0..2 {
            let mut strata: Vec<usize> = pts.iter().map(|p| (p[d] * 12.0).floor() as usize).collect();
            strata.sort_unstable();
            assert_eq!(strata, (0..12).collect::<Vec<_>>());
        }
    }

    #[test]
    fn exhaustion_and_determinism() {
        let mesh = generate_cylinder_mesh::<f64>(60.0, 5.0, 1.0, 10.0).unwrap();
        let m = mesh.num_vertices();
        let mut all = maximin_node_design(&mesh, m, 1, &DesignOptions::default()).unwrap();
        all.sort_unstable();
        assert_eq!(all, (0..m).collect::<Vec<_>>());
        let a = maximin_node_design(&mesh, 1, 42, &DesignOptions::default()).unwrap();
        let b = maximin_node_design(&mesh, 1, 42, &DesignOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!(maximin_node_design(&mesh, m + 1, 1, &DesignOptions::default()).is_err());
    }

    #[test]
    fn snapped_nodes_are_distinct() {
        let mesh = generate_cylinder_mesh::<f64>(30.0, 2.0, 1.0, 10.0).unwrap();
        let mut d = maximin_node_design(&mesh, 30, 9, &DesignOptions::default()).unwrap();
        d.sort_unstable();
        d.dedup();
        assert_eq!(d.len(), 30);
    }
}
