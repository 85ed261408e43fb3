//! Spline prediction and uncertainty quantification on triangulated surfaces.
//!
//! A surface is triangulated ([`mesh`]), linear finite elements give a mass
//! matrix and a stiffness matrix ([`fem`]), and these define an intrinsic
//! Gaussian Markov random field. The field is conditioned on observations
//! to give kriging means and posterior simulations ([`gmrf`]). Scale and
//! anisotropy come from maximum likelihood ([`likelihood`]). A harmonic
//! reference on the unit sphere ([`sphere_ref`]) serves for validation.
//!
//! Every numerical type is generic over [`Real`]; the aliases at the crate
//! root fix the scalar to `f64`.

pub mod data;
pub mod error;
pub mod fem;
pub mod gmrf;
pub mod likelihood;
pub mod mesh;
mod scalar;
pub mod solver;
pub mod sphere_ref;

pub use error::{Error, Result};
pub use scalar::Real;

pub type TriangleMeshF64 = mesh::TriangleMesh<f64>;
pub type ChartF64 = mesh::Chart<f64>;
pub type ObservationSetF64 = mesh::ObservationSet<f64>;
pub type BoundObservationsF64 = mesh::BoundObservations<f64>;
pub type FemOperatorsF64 = fem::FemOperators<f64>;
pub type AnisotropyF64 = fem::AnisotropyParams<f64>;
pub type CsrMatrixF64 = solver::CsrMatrix<f64>;
pub type SpdFactorF64 = solver::SpdFactor<f64>;
pub type PosteriorModelF64 = gmrf::PosteriorModel<f64>;
pub type SimulationBatchF64 = gmrf::SimulationBatch<f64>;
pub type SphereKrigingF64 = sphere_ref::SphereKriging<f64>;

pub type TriangleMeshF32 = mesh::TriangleMesh<f32>;
pub type FemOperatorsF32 = fem::FemOperators<f32>;
