//! Moore–Penrose pseudo-inverse of the whitened operator `S = M^{-1/2} F M^{-1/2}`
//! on a connected mesh, where `ker S = span(w)` with `w = M^{1/2} 1 / ‖M^{1/2} 1‖`.

use crate::scalar::{dot, Real};

use super::{conjugate_gradient, CgOptions, CsrMatrix, SolverError, SpdFactor};

/// How `S⁺ r` is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PinvBackend {
    /// Sparse Cholesky of `F` with one node grounded (row and column removed).
    /// The grounded matrix is positive definite on a connected mesh and the
    /// consistent singular system is solved exactly.
    GroundedCholesky,
    /// Jacobi-preconditioned CG directly on `S`, residuals projected off `w`.
    ConjugateGradient(CgOptions),
}

impl Default for PinvBackend {
    fn default() -> Self {
        Self::GroundedCholesky
    }
}

#[derive(Debug, Clone)]
enum Inner<T> {
    Grounded { factor: SpdFactor<T>, keep: Vec<usize> },
    Cg { s: CsrMatrix<T>, opts: CgOptions },
}

#[derive(Debug, Clone)]
pub struct WhitenedPinv<T> {
    sqrt_m: Vec<T>,
    inv_sqrt_m: Vec<T>,
    w: Vec<T>,
    inner: Inner<T>,
}

impl<T: Real> WhitenedPinv<T> {
    /// `stiffness` is `F`, `mass` the lumped diagonal of `M`.
    pub fn new(stiffness: &CsrMatrix<T>, mass: &[T], backend: PinvBackend) -> Result<Self, SolverError> {
        let m = mass.len();
        if stiffness.nrows() != m || stiffness.ncols() != m {
            return Err(SolverError::DimensionMismatch { expected: m, found: stiffness.nrows() });
        }
        if m < 2 {
            return Err(SolverError::InvalidInput("pseudo-inverse needs at least two nodes".into()));
        }
        if let Some(j) = mass.iter().position(|&v| !(v > T::zero())) {
            return Err(SolverError::InvalidInput(format!("mass entry {j} is not positive")));
        }
        let sqrt_m: Vec<T> = mass.iter().map(|&v| v.sqrt()).collect();
        let inv_sqrt_m: Vec<T> = sqrt_m.iter().map(|&v| T::one() / v).collect();
        let total = mass.iter().copied().sum::<T>().sqrt();
        let w: Vec<T> = sqrt_m.iter().map(|&v| v / total).collect();
        let inner = match backend {
            PinvBackend::GroundedCholesky => {
                let keep: Vec<usize> = (1..m).collect();
                let factor = SpdFactor::new(&stiffness.submatrix(&keep, &keep))?;
                Inner::Grounded { factor, keep }
            }
            PinvBackend::ConjugateGradient(opts) => {
                Inner::Cg { s: stiffness.scale(&inv_sqrt_m, &inv_sqrt_m), opts }
            }
        };
        Ok(Self { sqrt_m, inv_sqrt_m, w, inner })
    }

    pub fn size(&self) -> usize {
        self.w.len()
    }

    /// Unit kernel vector of `S`.
    pub fn kernel(&self) -> &[T] {
        &self.w
    }

    pub fn sqrt_mass(&self) -> &[T] {
        &self.sqrt_m
    }

    pub fn inv_sqrt_mass(&self) -> &[T] {
        &self.inv_sqrt_m
    }

    /// Removes the `w` component in place.
    pub fn project(&self, v: &mut [T]) {
        let c = dot(&self.w, v);
        for (vi, &wi) in v.iter_mut().zip(&self.w) {
            *vi -= c * wi;
        }
    }

    /// `S⁺ r`
    pub fn apply(&self, r: &[T]) -> Result<Vec<T>, SolverError> {
        if r.len() != self.size() {
            return Err(SolverError::DimensionMismatch { expected: self.size(), found: r.len() });
        }
        let mut rp = r.to_vec();
        self.project(&mut rp);
        let mut x = match &self.inner {
            Inner::Grounded { factor, keep } => {
                let rhs: Vec<T> = keep.iter().map(|&i| self.sqrt_m[i] * rp[i]).collect();
                let vg = factor.solve(&rhs);
                let mut x = vec![T::zero(); self.size()];
                for (&i, &v) in keep.iter().zip(&vg) {
                    x[i] = self.sqrt_m[i] * v;
                }
                x
            }
            Inner::Cg { s, opts } => conjugate_gradient(s, &rp, opts, |v| self.project(v))?.x,
        };
        self.project(&mut x);
        Ok(x)
    }

    /// `Σ b = M^{-1/2} (S⁺)² M^{-1/2} b`
    pub fn apply_sigma(&self, b: &[T]) -> Result<Vec<T>, SolverError> {
        let t: Vec<T> = b.iter().zip(&self.inv_sqrt_m).map(|(&v, &s)| v * s).collect();
        let t = self.apply(&t)?;
        let t = self.apply(&t)?;
        Ok(t.iter().zip(&self.inv_sqrt_m).map(|(&v, &s)| v * s).collect())
    }
}
