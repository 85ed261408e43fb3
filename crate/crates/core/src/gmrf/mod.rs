//! Posterior machinery for the intrinsic GMRF: prior draws, posterior means in
//! both observation scenarios, the α → ∞ mean correction, and conditional
//! (universal- and simple-kriging) simulations.

mod export;
mod model;
mod simulate;

pub use export::{summary_rows, write_sidecar_json, write_simulations_csv, write_summary_csv, SummaryRow};
pub use model::{ModelOptions, PosteriorModel};
pub use simulate::{SimulationBatch, SimulationKind};

use thiserror::Error;

use crate::fem::FemError;
use crate::solver::SolverError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GmrfError {
    #[error("mean correction singular: (Mφ0)ᵀ m_α(Pφ0) = {t:e} is too close to 0 or 1")]
    MeanCorrectionSingular { t: f64 },
    #[error("{context}: {source}")]
    Solver {
        context: &'static str,
        #[source]
        source: SolverError,
    },
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("need at least {needed} simulations, got {got}")]
    TooFewSimulations { needed: usize, got: usize },
}

pub(crate) trait SolverContext<T> {
    fn context(self, context: &'static str) -> Result<T, GmrfError>;
}

impl<T> SolverContext<T> for Result<T, SolverError> {
    fn context(self, context: &'static str) -> Result<T, GmrfError> {
        self.map_err(|source| GmrfError::Solver { context, source })
    }
}
