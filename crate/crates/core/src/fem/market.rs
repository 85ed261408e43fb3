//! Matrix Market coordinate export.

use std::io::{self, Write};

use crate::scalar::Real;
use crate::solver::CsrMatrix;

pub fn write_matrix_market<T: Real>(a: &CsrMatrix<T>, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for i in 0..a.nrows() {
        for (j, v) in a.row(i) {
            writeln!(out, "{} {} {:e}", i + 1, j + 1, v.as_f64())?;
        }
    }
    Ok(())
}

/// Diagonal matrix (e.g. the lumped mass) in coordinate format.
pub fn write_diagonal_market<T: Real>(d: &[T], out: impl Write) -> io::Result<()> {
    write_matrix_market(&CsrMatrix::from_diagonal(d), out)
}
