//! Jacobi-preconditioned conjugate gradients for symmetric positive
//! semidefinite systems with a consistent right-hand side.

use crate::scalar::{dot, norm2, Real};

use super::{CsrMatrix, SolverError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Relative residual target `‖b − Ax‖ / ‖b‖`.
    pub tol: f64,
    /// Iteration cap; `None` means `20 √n`.
    pub max_iter: Option<usize>,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: None }
    }
}

#[derive(Debug, Clone)]
pub struct CgOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    pub residual: f64,
}

/// Solves `A x = b` from `x = 0`.
///
/// `project` is applied to every residual and to the returned iterate; pass a
/// projector onto `range(A)` for singular systems, or the identity.
pub fn conjugate_gradient<T: Real>(
    a: &CsrMatrix<T>,
    b: &[T],
    opts: &CgOptions,
    project: impl Fn(&mut [T]),
) -> Result<CgOutcome<T>, SolverError> {
    let n = a.nrows();
    if b.len() != n {
        return Err(SolverError::DimensionMismatch { expected: n, found: b.len() });
    }
    let max_iter = opts.max_iter.unwrap_or_else(|| ((n as f64).sqrt() * 20.0).ceil() as usize).max(1);
    let inv_diag: Vec<T> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > T::zero() { T::one() / d } else { T::one() })
        .collect();

    let bnorm = norm2(b);
    let mut x = vec![T::zero(); n];
    if bnorm == T::zero() {
        return Ok(CgOutcome { x, iterations: 0, residual: 0.0 });
    }
    let tol = T::lit(opts.tol) * bnorm;
    let mut r = b.to_vec();
    project(&mut r);
    let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(&ri, &di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); n];
    let mut rnorm = norm2(&r);

    for it in 0..max_iter {
        if rnorm <= tol {
            project(&mut x);
            return Ok(CgOutcome { x, iterations: it, residual: (rnorm / bnorm).as_f64() });
        }
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= T::zero() {
            break;
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        project(&mut r);
        rnorm = norm2(&r);
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if rnorm <= tol {
        project(&mut x);
        return Ok(CgOutcome { x, iterations: max_iter, residual: (rnorm / bnorm).as_f64() });
    }
    Err(SolverError::NoConvergence {
        method: "conjugate gradient",
        iterations: max_iter,
        residual: (rnorm / bnorm).as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_spd_tridiagonal() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.5));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).cos()).collect();
        let out = conjugate_gradient(&a, &b, &CgOptions { tol: 1e-12, max_iter: Some(500) }, |_| {}).unwrap();
        let r: Vec<f64> = a.mul_vec(&out.x).iter().zip(&b).map(|(ax, bi)| ax - bi).collect();
        assert!(norm2(&r) <= 1e-11 * norm2(&b));
    }

    #[test]
    fn reports_non_convergence() {
        let a = CsrMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (1, 1, 100.0), (2, 2, 1e4), (0, 1, 0.5), (1, 0, 0.5)]);
        let err = conjugate_gradient(&a, &[1.0, 1.0, 1.0], &CgOptions { tol: 1e-30, max_iter: Some(1) }, |_| {})
            .unwrap_err();
        assert!(matches!(err, SolverError::NoConvergence { .. }));
    }
}
