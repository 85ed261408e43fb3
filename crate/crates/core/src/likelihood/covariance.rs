//! Observation covariance `K = P Σ Pᵀ + τ² I` and the profiled likelihood.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::fem::FemOperators;
use crate::mesh::BoundObservations;
use crate::scalar::Real;
use crate::solver::WhitenedPinv;

use super::FitError;

/// Largest number of observations handled by the dense path.
pub const MAX_OBSERVATIONS: usize = 1000;

/// Builds `K` column by column from `n` applications of `Σ` to the rows of `P`.
pub fn observation_covariance<T: Real>(
    ops: &FemOperators<T>,
    pinv: &WhitenedPinv<T>,
    bound: &BoundObservations<T>,
    tau: T,
) -> Result<DMatrix<T>, FitError> {
    let n = bound.len();
    if n > MAX_OBSERVATIONS {
        return Err(FitError::TooManyObservations { size: n, limit: MAX_OBSERVATIONS });
    }
    if pinv.size() != ops.size() || bound.num_nodes() != ops.size() {
        return Err(FitError::InvalidInput("operators, pseudo-inverse and bindings disagree in size".into()));
    }
    let p = bound.projection();
    let cols = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            let b = p.tr_mul_vec(&e);
            Ok(p.mul_vec(&pinv.apply_sigma(&b)?))
        })
        .collect::<Result<Vec<Vec<T>>, crate::solver::SolverError>>()?;
    let mut k = DMatrix::from_fn(n, n, |i, j| cols[j][i]);
    k = (&k + k.transpose()) * T::lit(0.5);
    for i in 0..n {
        k[(i, i)] += tau * tau;
    }
    Ok(k)
}

/// Profiled likelihood at fixed `β` (and `τ`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodValue<T> {
    /// `L^C = −n log σ* − ½ log|K|`
    pub value: T,
    /// GLS trend coefficient `a* = pᵀK⁻¹y / pᵀK⁻¹p`, `p = Pφ0`.
    pub a_star: T,
    /// `σ* = [(y − a*p)ᵀ K⁻¹ (y − a*p) / n]^{1/2}`
    pub sigma_star: T,
    pub log_det: T,
    /// `σ*` was floored at `1e-12 · max|y|` (data reproduced by the trend alone).
    pub sigma_floored: bool,
}

/// Closed-form profile of the Gaussian log-likelihood over `a` and `σ`.
pub fn concentrated_loglik<T: Real>(
    ops: &FemOperators<T>,
    pinv: &WhitenedPinv<T>,
    bound: &BoundObservations<T>,
    y: &[T],
    tau: T,
) -> Result<LikelihoodValue<T>, FitError> {
    let n = bound.len();
    if y.len() != n {
        return Err(FitError::InvalidInput(format!("{} values for {n} observations", y.len())));
    }
    let k = observation_covariance(ops, pinv, bound, tau)?;
    profile(&k, &bound.project(ops.phi0()), y)
}

pub(crate) fn profile<T: Real>(k: &DMatrix<T>, p: &[T], y: &[T]) -> Result<LikelihoodValue<T>, FitError> {
    let n = y.len();
    let chol = k.clone().cholesky().ok_or(FitError::SingularCovariance)?;
    let l = chol.l_dirty();
    let diag_max = (0..n).fold(T::zero(), |a, i| a.max(k[(i, i)]));
    let diag_min = (0..n).fold(T::max_value().unwrap(), |a, i| a.min(l[(i, i)] * l[(i, i)]));
    if !(diag_min > T::lit(1e-14) * diag_max) {
        return Err(FitError::SingularCovariance);
    }
    let log_det = (0..n).map(|i| l[(i, i)].ln()).sum::<T>() * T::lit(2.0);
    let pv = DVector::from_column_slice(p);
    let yv = DVector::from_column_slice(y);
    let kp = chol.solve(&pv);
    let ky = chol.solve(&yv);
    let a_star = pv.dot(&ky) / pv.dot(&kp);
    let r = &yv - &pv * a_star;
    let kr = chol.solve(&r);
    let s2 = (r.dot(&kr) / T::from_count(n)).max(T::zero());
    let mut sigma_star = s2.sqrt();
    let scale = y.iter().fold(T::zero(), |a, &v| a.max(v.abs())).max(<T as Real>::epsilon());
    let floor = T::lit(1e-12) * scale;
    let sigma_floored = !(sigma_star > floor);
    if sigma_floored {
        sigma_star = floor;
    }
    let value = -T::from_count(n) * sigma_star.ln() - log_det * T::lit(0.5);
    Ok(LikelihoodValue { value, a_star, sigma_star, log_det, sigma_floored })
}

/// Gaussian log-likelihood `log N(y; a p, σ² K)`.
pub fn full_loglik<T: Real>(k: &DMatrix<T>, p: &[T], y: &[T], a: T, sigma: T) -> Result<T, FitError> {
    let n = y.len();
    let chol = k.clone().cholesky().ok_or(FitError::SingularCovariance)?;
    let l = chol.l_dirty();
    let log_det = (0..n).map(|i| l[(i, i)].ln()).sum::<T>() * T::lit(2.0);
    let r = DVector::from_column_slice(y) - DVector::from_column_slice(p) * a;
    let quad = r.dot(&chol.solve(&r));
    let nn = T::from_count(n);
    Ok(-nn * T::lit(0.5) * T::two_pi().ln() - nn * sigma.ln() - log_det * T::lit(0.5)
        - quad / (T::lit(2.0) * sigma * sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_gls() {
        let k = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let p = [1.0, 2.0];
        let y = [3.0, -1.0];
        let v = profile(&k, &p, &y).unwrap();
        let det: f64 = 2.0 * 1.0 - 0.25;
        let kinv = [[1.0 / det, -0.5 / det], [-0.5 / det, 2.0 / det]];
        let q = |a: [f64; 2], b: [f64; 2]| {
            a[0] * (kinv[0][0] * b[0] + kinv[0][1] * b[1]) + a[1] * (kinv[1][0] * b[0] + kinv[1][1] * b[1])
        };
        let a = q(p, y) / q(p, p);
        let r = [y[0] - a * p[0], y[1] - a * p[1]];
        let s = (q(r, r) / 2.0).sqrt();
        assert!((v.a_star - a).abs() < 1e-12);
        assert!((v.sigma_star - s).abs() < 1e-12);
        assert!((v.log_det - det.ln()).abs() < 1e-12);
        assert!((v.value - (-2.0 * s.ln() - 0.5 * det.ln())).abs() < 1e-12);
    }

    #[test]
    fn trend_only_data_floors_sigma() {
        let k = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let p = [1.0, 2.0];
        let y = [3.0, 6.0];
        let v = profile(&k, &p, &y).unwrap();
        assert!(v.sigma_floored);
        assert!(v.sigma_star <= 1e-8 * 6.0);
    }
}
