//! Maximum-likelihood estimation of the trend coefficient `a`, the scale `σ`,
//! the anisotropy `β` and optionally the noise ratio `τ`.

mod covariance;
mod fit;
mod nelder_mead;

pub use covariance::{concentrated_loglik, full_loglik, observation_covariance, LikelihoodValue};
pub use fit::{evaluate, fit, fit_bound, AnisotropyMode, FitOptions, FitResult, StartReport, TraceEntry, DEFAULT_STARTS};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};

use thiserror::Error;

use crate::fem::FemError;
use crate::mesh::MeshError;
use crate::solver::SolverError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error(
        "observation covariance K is numerically singular; with τ = 0 the data must be interpolable \
         (distinct observation nodes, fewer than the mesh size)"
    )]
    SingularCovariance,
    #[error("dense observation covariance limited to {limit} observations, got {size}")]
    TooManyObservations { size: usize, limit: usize },
    #[error("every optimizer start failed: {0}")]
    AllStartsFailed(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}
