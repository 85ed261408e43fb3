//! Built-in test fields, gridded CSV ingestion and predictive scores.

mod franke;
mod grid;
mod score;

pub use franke::{franke, franke_cylinder, FRANKE_HEIGHT};
pub use grid::{load_gridded_csv, parse_gridded_csv, write_gridded_csv, GriddedField};
pub use score::{predictive_score, rmse, ScoreConvention};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("value {value} out of range: {what}")]
    OutOfRange { value: f64, what: &'static str },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
