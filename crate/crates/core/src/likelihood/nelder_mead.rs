//! Derivative-free simplex minimization.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Stop when `max f − min f` over the simplex falls below this.
    pub f_tol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { f_tol: 1e-6, max_evals: 200 }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
    /// Every evaluation in order: `(point, value)`.
    pub history: Vec<(Vec<f64>, f64)>,
}

/// Minimizes `f` from the simplex `x0, x0 + step_i e_i`.
///
/// Non-finite objective values are treated as `+∞`.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    opts: &NelderMeadOptions,
) -> NelderMeadResult {
    let d = x0.len();
    let mut history = Vec::new();
    let mut eval = |x: &[f64], history: &mut Vec<(Vec<f64>, f64)>| {
        let v = f(x);
        let v = if v.is_finite() { v } else { f64::INFINITY };
        history.push((x.to_vec(), v));
        v
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = eval(x0, &mut history);
    simplex.push((x0.to_vec(), v0));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let v = eval(&x, &mut history);
        simplex.push((x, v));
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut converged = false;
    while history.len() < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[d].1 - simplex[0].1;
        if spread.is_finite() && spread < opts.f_tol {
            converged = true;
            break;
        }
        let centroid: Vec<f64> =
            (0..d).map(|k| simplex[..d].iter().map(|p| p.0[k]).sum::<f64>() / d as f64).collect();
        let worst = simplex[d].clone();
        let along = |t: f64| -> Vec<f64> { (0..d).map(|k| centroid[k] + t * (worst.0[k] - centroid[k])).collect() };

        let xr = along(-alpha);
        let fr = eval(&xr, &mut history);
        if fr < simplex[0].1 {
            let xe = along(-gamma);
            let fe = eval(&xe, &mut history);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let x = along(-rho);
            let v = eval(&x, &mut history);
            (x, v)
        } else {
            let x = along(rho);
            let v = eval(&x, &mut history);
            (x, v)
        };
        if fc < worst.1.min(fr) {
            simplex[d] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for p in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = (0..d).map(|k| best[k] + sigma * (p.0[k] - best[k])).collect();
            let v = eval(&x, &mut history);
            *p = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    NelderMeadResult { x, f, evals: history.len(), converged, history }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic() {
        let r = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
            &[0.5, 0.5],
            &NelderMeadOptions { f_tol: 1e-12, max_evals: 1000 },
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] + 2.0).abs() < 1e-4);
    }

    #[test]
    fn respects_budget() {
        let r = nelder_mead(|x| x[0].sin() * 1e-3 + x[0] * x[0], &[3.0], &[1.0], &NelderMeadOptions {
            f_tol: 0.0,
            max_evals: 25,
        });
        assert!(!r.converged);
        assert!(r.evals <= 25 + 2);
    }
}
