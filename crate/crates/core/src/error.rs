use thiserror::Error;

use crate::data::DataError;
use crate::fem::FemError;
use crate::gmrf::GmrfError;
use crate::likelihood::FitError;
use crate::mesh::MeshError;
use crate::solver::SolverError;
use crate::sphere_ref::SphereError;

/// Umbrella error for callers that chain several modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Gmrf(#[from] GmrfError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
