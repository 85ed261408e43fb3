//! Dense reference covariance `Σ = M^{-1/2} f(S) M^{-1/2}` with
//! `f(λ) = λ⁻² 1_{λ>0}`, from a full symmetric eigendecomposition.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;
use crate::solver::DENSE_LIMIT;

use super::{FemError, FemOperators};

#[derive(Debug, Clone)]
pub struct DenseSigma<T: Real> {
    pub sigma: DMatrix<T>,
    /// Eigenvalues of `S` in increasing order.
    pub eigenvalues: Vec<T>,
}

/// Eigenvalues at or below `1e-9 · λ_max` count as zero; exactly one is allowed.
pub fn dense_sigma_oracle<T: Real>(ops: &FemOperators<T>) -> Result<DenseSigma<T>, FemError> {
    let m = ops.size();
    if m > DENSE_LIMIT {
        return Err(FemError::DenseTooLarge { size: m, limit: DENSE_LIMIT });
    }
    let s = ops.whitened().to_dense();
    let s = (&s + s.transpose()) * T::lit(0.5);
    let eig = s.symmetric_eigen();
    let lmax = eig.eigenvalues.iter().fold(T::zero(), |a, &b| a.max(b));
    let threshold = T::lit(1e-9) * lmax;
    let zeros = eig.eigenvalues.iter().filter(|&&l| l <= threshold).count();
    if zeros != 1 {
        return Err(FemError::MultipleZeroModes { count: zeros });
    }
    let f = DVector::from_iterator(
        m,
        eig.eigenvalues.iter().map(|&l| if l > threshold { T::one() / (l * l) } else { T::zero() }),
    );
    let v = &eig.eigenvectors;
    let mut core = v * DMatrix::from_diagonal(&f) * v.transpose();
    let inv_sqrt: Vec<T> = ops.mass().iter().map(|&x| T::one() / x.sqrt()).collect();
    for i in 0..m {
        for j in 0..m {
            core[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    let sigma = (&core + core.transpose()) * T::lit(0.5);
    let mut eigenvalues: Vec<T> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(DenseSigma { sigma, eigenvalues })
}
