//! Sparse linear algebra: factorizations, rank-one corrected solves, the
//! pseudo-inverse of the whitened operator, sampling and spectral bounds.

mod cg;
mod cholesky;
mod csr;
mod pinv;
mod rank_one;
mod sampling;
mod spectral;

pub use cg::{conjugate_gradient, CgOptions, CgOutcome};
pub use cholesky::{Ordering, SpdFactor};
pub use csr::CsrMatrix;
pub use pinv::{PinvBackend, WhitenedPinv};
pub use rank_one::RankOneSystem;
pub use sampling::{DensePrecisionSampler, PrecisionSampler};
pub use spectral::{
    estimate_spectral_bounds, inverse_iteration_min, power_iteration_max, shifted_power_min, MinEigenMethod,
    SpectralBounds, SpectralOptions,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix not positive definite: pivot {pivot} (original index) has value {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("fill-reducing ordering failed: {0}")]
    Ordering(String),
    #[error("ill-posed rank-one update: denominator {denominator:e}")]
    IllPosedUpdate { denominator: f64 },
    #[error("{method} did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { method: &'static str, iterations: usize, residual: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dense backend limited to {limit} unknowns, got {size}")]
    DenseTooLarge { size: usize, limit: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Largest problem the dense reference paths accept.
pub const DENSE_LIMIT: usize = 4000;
