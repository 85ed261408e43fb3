//! Draws with covariance `Q̃_α⁻¹ = σ²Σ + α φ0 φ0ᵀ` from standard-normal input.

use nalgebra::{DMatrix, DVector};

use crate::scalar::{dot, Real};

use super::{CsrMatrix, SolverError, WhitenedPinv, DENSE_LIMIT};

/// Sparse sampler: `z = σ M^{-1/2} S⁺ ε + √α φ0 (wᵀε)`.
///
/// The two terms live in orthogonal subspaces of the whitened space, so the
/// covariance is exactly `σ² M^{-1/2}(S⁺)²M^{-1/2} + α φ0φ0ᵀ` for every α.
#[derive(Debug, Clone, Copy)]
pub struct PrecisionSampler<'a, T> {
    pinv: &'a WhitenedPinv<T>,
    phi0: &'a [T],
    sigma: T,
    alpha: T,
}

impl<'a, T: Real> PrecisionSampler<'a, T> {
    pub fn new(pinv: &'a WhitenedPinv<T>, phi0: &'a [T], sigma: T, alpha: T) -> Result<Self, SolverError> {
        if phi0.len() != pinv.size() {
            return Err(SolverError::DimensionMismatch { expected: pinv.size(), found: phi0.len() });
        }
        if !(sigma > T::zero()) || !(alpha > T::zero()) {
            return Err(SolverError::InvalidInput("sigma and alpha must be positive".into()));
        }
        Ok(Self { pinv, phi0, sigma, alpha })
    }

    pub fn sample(&self, eps: &[T]) -> Result<Vec<T>, SolverError> {
        let x = self.pinv.apply(eps)?;
        let c = self.alpha.sqrt() * dot(self.pinv.kernel(), eps);
        Ok(x
            .iter()
            .zip(self.pinv.inv_sqrt_mass())
            .zip(self.phi0)
            .map(|((&xi, &s), &p)| self.sigma * s * xi + c * p)
            .collect())
    }
}

/// Reference sampler: dense Cholesky `Q̃_α = L Lᵀ`, then `Lᵀ z = ε`.
#[derive(Debug, Clone)]
pub struct DensePrecisionSampler<T: Real> {
    l: DMatrix<T>,
}

impl<T: Real> DensePrecisionSampler<T> {
    /// `q` is the precision core `Q = F M⁻¹ F`, `u = M φ0`.
    pub fn new(q: &CsrMatrix<T>, u: &[T], sigma: T, alpha: T) -> Result<Self, SolverError> {
        let m = q.nrows();
        if m > DENSE_LIMIT {
            return Err(SolverError::DenseTooLarge { size: m, limit: DENSE_LIMIT });
        }
        let uv = DVector::from_column_slice(u);
        let qt = q.to_dense() / (sigma * sigma) + &uv * uv.transpose() / alpha;
        let chol = qt.cholesky().ok_or(SolverError::NotPositiveDefinite { pivot: 0, value: f64::NAN })?;
        Ok(Self { l: chol.l() })
    }

    pub fn sample(&self, eps: &[T]) -> Vec<T> {
        let z = self
            .l
            .tr_solve_lower_triangular(&DVector::from_column_slice(eps))
            .expect("Cholesky factor has a positive diagonal");
        z.as_slice().to_vec()
    }
}
