//! Dense reference computations shared by the integration tests.
#![allow(dead_code)]

use manifold_splines::fem::FemOperators;
use manifold_splines::mesh::{BoundObservations, Chart, TriangleMesh};
use nalgebra::{DMatrix, DVector};

/// Regular tetrahedron inscribed in the unit sphere.
pub fn tetrahedron() -> TriangleMesh<f64> {
    let s = 1.0 / 3f64.sqrt();
    TriangleMesh::new(
        vec![[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]],
        vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
    )
    .unwrap()
}

/// Unit square `[0, 1]²` split into `k × k` cells, each cut along a diagonal,
/// with chart `(x, y)`.
pub fn unit_square(k: usize) -> TriangleMesh<f64> {
    let h = 1.0 / k as f64;
    let idx = |i: usize, j: usize| j * (k + 1) + i;
    let mut v = Vec::new();
    for j in 0..=k {
        for i in 0..=k {
            v.push([i as f64 * h, j as f64 * h, 0.0]);
        }
    }
    let mut t = Vec::new();
    for j in 0..k {
        for i in 0..k {
            t.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            t.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    let coords = v.iter().map(|p| [p[0], p[1]]).collect();
    let chart = Chart { coords, bounds: [[0.0, 1.0], [0.0, 1.0]], periodic: [false, false] };
    TriangleMesh::new(v, t).unwrap().with_chart(chart).unwrap()
}

/// `Σ = M^{-1/2} (S²)⁺ M^{-1/2}` from a symmetric eigendecomposition of the
/// dense whitened stiffness `S = M^{-1/2} F M^{-1/2}`.
pub fn dense_sigma(ops: &FemOperators<f64>) -> DMatrix<f64> {
    let m = ops.size();
    let f = ops.stiffness().to_dense();
    let ism: Vec<f64> = ops.mass().iter().map(|v| 1.0 / v.sqrt()).collect();
    let s = DMatrix::from_fn(m, m, |i, j| ism[i] * f[(i, j)] * ism[j]);
    let s = (&s + s.transpose()) * 0.5;
    let eig = s.symmetric_eigen();
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut pinv2 = DMatrix::zeros(m, m);
    for k in 0..m {
        let l = eig.eigenvalues[k];
        if l.abs() > 1e-9 * lmax {
            let v = eig.eigenvectors.column(k);
            pinv2 += (&v * v.transpose()) / (l * l);
        }
    }
    DMatrix::from_fn(m, m, |i, j| ism[i] * pinv2[(i, j)] * ism[j])
}

pub struct DenseLimit {
    pub mean: DVector<f64>,
    pub trend: f64,
    /// Universal-kriging posterior covariance (unit σ).
    pub cov_uk: DMatrix<f64>,
    /// Simple-kriging posterior covariance (unit σ).
    pub cov_sk: DMatrix<f64>,
}

/// Universal-kriging limit with a constant trend along `φ0`:
/// `K = PΣPᵀ + τ²I`, `a = pᵀK⁻¹y / pᵀK⁻¹p`, `m = aφ0 + ΣPᵀK⁻¹(y − ap)`.
pub fn dense_limit(sigma: &DMatrix<f64>, phi0: &[f64], p: &DMatrix<f64>, y: &[f64], tau: f64) -> DenseLimit {
    let n = p.nrows();
    let k = p * sigma * p.transpose() + DMatrix::identity(n, n) * (tau * tau);
    let kinv = k.clone().try_inverse().expect("K invertible");
    let phi0 = DVector::from_column_slice(phi0);
    let pv = p * &phi0;
    let yv = DVector::from_column_slice(y);
    let beta = pv.dot(&(&kinv * &pv));
    let a = pv.dot(&(&kinv * &yv)) / beta;
    let sp = sigma * p.transpose();
    let mean = &phi0 * a + &sp * (&kinv * (&yv - &pv * a));
    let b = &phi0 - &sp * (&kinv * &pv);
    let cov_sk = sigma - &sp * &kinv * sp.transpose();
    let cov_uk = &cov_sk + (&b * b.transpose()) / beta;
    DenseLimit { mean, trend: a, cov_uk, cov_sk }
}

pub fn dense_projection(bound: &BoundObservations<f64>) -> DMatrix<f64> {
    bound.projection().to_dense()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Smooth test signal on `R³`.
pub fn signal(p: [f64; 3]) -> f64 {
    (1.3 * p[0]).sin() + 0.7 * (2.1 * p[1] + 0.4).cos() + 0.5 * p[2] * p[0] + 0.2
}

/// Deterministic "random" barycentric points on distinct triangles.
pub fn barycentric_points(mesh: &TriangleMesh<f64>, n: usize, salt: u64) -> Vec<[f64; 3]> {
    let tris = mesh.triangles();
    let v = mesh.vertices();
    (0..n)
        .map(|k| {
            let h = (k as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt;
            let t = tris[(h % tris.len() as u64) as usize];
            let u = ((h >> 20) % 1000) as f64 / 1000.0 * 0.8 + 0.1;
            let w = ((h >> 40) % 1000) as f64 / 1000.0 * (0.9 - u) + 0.05;
            let c = [u, w, 1.0 - u - w];
            [0, 1, 2].map(|d| c[0] * v[t[0]][d] + c[1] * v[t[1]][d] + c[2] * v[t[2]][d])
        })
        .collect()
}

/// `n` distinct node indices spread through `0..m`.
pub fn spread_nodes(m: usize, n: usize, salt: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut j = salt % m;
    let step = (m / n).max(1);
    while out.len() < n {
        if !out.contains(&j) {
            out.push(j);
        }
        j = (j + step + 1) % m;
    }
    out
}
