//! Observation sets and their binding to mesh nodes or barycentric rows.

use crate::scalar::Real;
use crate::solver::CsrMatrix;

use super::{dot3, sub3, MeshError, TriangleMesh};

#[derive(Debug, Clone, PartialEq)]
pub enum Locations<T> {
    /// Mesh node indices.
    Nodes(Vec<usize>),
    /// Points on (or within tolerance of) the surface.
    Points(Vec<[T; 3]>),
}

impl<T> Locations<T> {
    pub fn len(&self) -> usize {
        match self {
            Locations::Nodes(v) => v.len(),
            Locations::Points(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Exact interpolation at nodes (`τ = 0`) or noisy observations (`τ > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Interpolation,
    Smoothing,
}

impl Scenario {
    pub fn number(self) -> u8 {
        match self {
            Scenario::Interpolation => 1,
            Scenario::Smoothing => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet<T> {
    pub locations: Locations<T>,
    pub values: Vec<T>,
    /// Noise scale relative to σ.
    pub tau: T,
}

impl<T: Real> ObservationSet<T> {
    pub fn at_nodes(nodes: Vec<usize>, values: Vec<T>, tau: T) -> Result<Self, MeshError> {
        let s = Self { locations: Locations::Nodes(nodes), values, tau };
        s.validate()?;
        Ok(s)
    }

    pub fn at_points(points: Vec<[T; 3]>, values: Vec<T>, tau: T) -> Result<Self, MeshError> {
        let s = Self { locations: Locations::Points(points), values, tau };
        s.validate()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scenario(&self) -> Scenario {
        if self.tau > T::zero() {
            Scenario::Smoothing
        } else {
            Scenario::Interpolation
        }
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        if self.values.is_empty() {
            return Err(MeshError::Observation("at least one observation is required".into()));
        }
        if self.locations.len() != self.values.len() {
            return Err(MeshError::Observation(format!(
                "{} locations for {} values",
                self.locations.len(),
                self.values.len()
            )));
        }
        if !(self.tau >= T::zero()) || !self.tau.is_finite() {
            return Err(MeshError::Observation("tau must be finite and non-negative".into()));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(MeshError::Observation(format!("value {i} is not finite")));
        }
        if self.tau == T::zero() {
            let Locations::Nodes(nodes) = &self.locations else {
                return Err(MeshError::Observation("tau = 0 requires node-index locations".into()));
            };
            let mut sorted = nodes.clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(MeshError::Observation(format!("duplicate node index {}", w[0])));
            }
        }
        Ok(())
    }
}

/// Observations attached to a mesh: the `n × m` projection matrix `P`.
///
/// In the interpolation scenario `P` is the 0/1 selection of the nodes `I`
/// and `complement` lists `Ī` in increasing order.
#[derive(Debug, Clone)]
pub struct BoundObservations<T> {
    scenario: Scenario,
    projection: CsrMatrix<T>,
    nodes: Option<Vec<usize>>,
    complement: Vec<usize>,
    tau: T,
}

impl<T: Real> BoundObservations<T> {
    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn projection(&self) -> &CsrMatrix<T> {
        &self.projection
    }

    pub fn len(&self) -> usize {
        self.projection.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_nodes(&self) -> usize {
        self.projection.ncols()
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    /// Observed node indices `I` (interpolation scenario or node locations).
    pub fn nodes(&self) -> Option<&[usize]> {
        self.nodes.as_deref()
    }

    /// `Ī` in the interpolation scenario, empty otherwise.
    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    /// `P z`
    pub fn project(&self, z: &[T]) -> Vec<T> {
        self.projection.mul_vec(z)
    }

    /// `Pᵀ v`
    pub fn project_t(&self, v: &[T]) -> Vec<T> {
        self.projection.tr_mul_vec(v)
    }

    /// Same binding with observations permuted: new row `k` is old row `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let cols: Vec<usize> = (0..self.num_nodes()).collect();
        Self {
            scenario: self.scenario,
            projection: self.projection.submatrix(order, &cols),
            nodes: self.nodes.as_ref().map(|n| order.iter().map(|&k| n[k]).collect()),
            complement: self.complement.clone(),
            tau: self.tau,
        }
    }
}

pub fn bind_observations<T: Real>(mesh: &TriangleMesh<T>, obs: &ObservationSet<T>) -> Result<BoundObservations<T>, MeshError> {
    let tol = mesh.bounding_box_diagonal() * T::lit(1e-6);
    bind_observations_with_tolerance(mesh, obs, tol)
}

/// Binds observations; points farther than `tolerance` from every triangle fail.
pub fn bind_observations_with_tolerance<T: Real>(
    mesh: &TriangleMesh<T>,
    obs: &ObservationSet<T>,
    tolerance: T,
) -> Result<BoundObservations<T>, MeshError> {
    obs.validate()?;
    let m = mesh.num_vertices();
    let n = obs.len();
    let scenario = obs.scenario();
    let mut trip = Vec::with_capacity(3 * n);
    let mut nodes = None;
    match &obs.locations {
        Locations::Nodes(idx) => {
            for (row, &j) in idx.iter().enumerate() {
                if j >= m {
                    return Err(MeshError::Observation(format!("node index {j} out of range (m = {m})")));
                }
                trip.push((row, j, T::one()));
            }
            nodes = Some(idx.clone());
        }
        Locations::Points(pts) => {
            for (row, &p) in pts.iter().enumerate() {
                let (tri, weights, dist) = closest_triangle(mesh, p);
                if dist > tolerance {
                    return Err(MeshError::Binding {
                        index: row,
                        distance: dist.as_f64(),
                        tolerance: tolerance.as_f64(),
                    });
                }
                for k in 0..3 {
                    if weights[k] != T::zero() {
                        trip.push((row, mesh.triangles()[tri][k], weights[k]));
                    }
                }
            }
        }
    }
    let complement = match (&nodes, scenario) {
        (Some(idx), Scenario::Interpolation) => {
            let mut observed = vec![false; m];
            idx.iter().for_each(|&j| observed[j] = true);
            (0..m).filter(|&j| !observed[j]).collect()
        }
        _ => Vec::new(),
    };
    Ok(BoundObservations {
        scenario,
        projection: CsrMatrix::from_triplets(n, m, &trip),
        nodes,
        complement,
        tau: obs.tau,
    })
}

/// Triangle closest to `p`, barycentric weights of the closest point, distance.
fn closest_triangle<T: Real>(mesh: &TriangleMesh<T>, p: [T; 3]) -> (usize, [T; 3], T) {
    let mut best = (0, [T::zero(); 3], T::max_value().unwrap());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let [a, b, c] = tri.map(|i| mesh.vertices()[i]);
        let (w, q) = closest_point_on_triangle(p, a, b, c);
        let d = sub3(p, q);
        let dist = dot3(d, d).sqrt();
        if dist < best.2 {
            best = (t, w, dist);
        }
    }
    best
}

/// Closest point to `p` on triangle `abc`: barycentric weights and the point.
pub fn closest_point_on_triangle<T: Real>(p: [T; 3], a: [T; 3], b: [T; 3], c: [T; 3]) -> ([T; 3], [T; 3]) {
    let (o, z) = (T::one(), T::zero());
    let ab = sub3(b, a);
    let ac = sub3(c, a);
    let ap = sub3(p, a);
    let d1 = dot3(ab, ap);
    let d2 = dot3(ac, ap);
    let point = |w: [T; 3]| {
        let mut q = [z; 3];
        for d in 0..3 {
            q[d] = w[0] * a[d] + w[1] * b[d] + w[2] * c[d];
        }
        (w, q)
    };
    if d1 <= z && d2 <= z {
        return point([o, z, z]);
    }
    let bp = sub3(p, b);
    let d3 = dot3(ab, bp);
    let d4 = dot3(ac, bp);
    if d3 >= z && d4 <= d3 {
        return point([z, o, z]);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= z && d1 >= z && d3 <= z {
        let v = d1 / (d1 - d3);
        return point([o - v, v, z]);
    }
    let cp = sub3(p, c);
    let d5 = dot3(ab, cp);
    let d6 = dot3(ac, cp);
    if d6 >= z && d5 <= d6 {
        return point([z, z, o]);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= z && d2 >= z && d6 <= z {
        let w = d2 / (d2 - d6);
        return point([o - w, z, w]);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= z && (d4 - d3) >= z && (d5 - d6) >= z {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return point([z, o - w, w]);
    }
    let denom = o / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    point([o - v - w, v, w])
}
