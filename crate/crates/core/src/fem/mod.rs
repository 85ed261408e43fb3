//! Piecewise-linear finite elements on triangle meshes: lumped mass `M`,
//! stiffness `F` (optionally under a deformed metric), whitened operator
//! `S = M^{-1/2} F M^{-1/2}`, precision core `Q = F M⁻¹ F` and `φ0`.

mod assemble;
mod market;
mod oracle;

pub use assemble::{assemble, element_stiffness, triangle_frame};
pub use market::{write_diagonal_market, write_matrix_market};
pub use oracle::{dense_sigma_oracle, DenseSigma};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use crate::solver::{CsrMatrix, PinvBackend, SolverError, WhitenedPinv};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("deformed triangle {triangle} is degenerate (area {area:e})")]
    DegenerateElement { triangle: usize, area: f64 },
    #[error("anisotropic assembly needs chart coordinates")]
    MissingChart,
    #[error("chart gives no usable frame on triangle {triangle}")]
    ChartFrame { triangle: usize },
    #[error("mesh yields multiple near-zero modes ({count} eigenvalues below threshold)")]
    MultipleZeroModes { count: usize },
    #[error("dense oracle limited to {limit} nodes, got {size}")]
    DenseTooLarge { size: usize, limit: usize },
    #[error("invalid anisotropy: {0}")]
    InvalidAnisotropy(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Metric deformation `G = R D² Rᵀ` with `R` the rotation by `angle` and
/// `D = diag(e^{r/2}, e^{−r/2})`, `r = log_ratio`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyParams<T> {
    pub angle: T,
    pub log_ratio: T,
}

impl<T: Real> AnisotropyParams<T> {
    pub fn new(angle: T, log_ratio: T) -> Result<Self, FemError> {
        if !angle.is_finite() || !log_ratio.is_finite() {
            return Err(FemError::InvalidAnisotropy("angle and log_ratio must be finite".into()));
        }
        Ok(Self { angle, log_ratio })
    }

    pub fn isotropic() -> Self {
        Self { angle: T::zero(), log_ratio: T::zero() }
    }

    pub fn is_isotropic(&self) -> bool {
        self.log_ratio == T::zero()
    }

    /// Equivalent parameters with `log_ratio ≥ 0` and `angle ∈ (−π/2, π/2]`.
    ///
    /// `(angle, r)` and `(angle + π/2, −r)` define the same metric, as do
    /// angles differing by π.
    pub fn canonical(&self) -> Self {
        let pi = T::pi();
        let half = pi * T::lit(0.5);
        let (mut angle, mut r) = (self.angle, self.log_ratio);
        if r < T::zero() {
            angle += half;
            r = -r;
        }
        angle -= pi * ((angle + half) / pi).floor();
        if angle <= -half {
            angle += pi;
        }
        if r == T::zero() {
            angle = T::zero();
        }
        Self { angle, log_ratio: r }
    }

    /// `T = D⁻¹ Rᵀ` as a row-major 2×2 matrix.
    pub fn transform(&self) -> [[T; 2]; 2] {
        let (s, c) = self.angle.sin_cos();
        let h = self.log_ratio * T::lit(0.5);
        let (d0, d1) = ((-h).exp(), h.exp());
        [[d0 * c, d0 * s], [-d1 * s, d1 * c]]
    }
}

/// Assembled operators of one mesh and metric.
#[derive(Debug, Clone)]
pub struct FemOperators<T> {
    mass: Vec<T>,
    stiffness: CsrMatrix<T>,
    whitened: CsrMatrix<T>,
    precision: CsrMatrix<T>,
    phi0: Vec<T>,
}

impl<T: Real> FemOperators<T> {
    pub(crate) fn from_parts(mass: Vec<T>, stiffness: CsrMatrix<T>) -> Self {
        let inv_sqrt: Vec<T> = mass.iter().map(|&v| T::one() / v.sqrt()).collect();
        let inv: Vec<T> = mass.iter().map(|&v| T::one() / v).collect();
        let ones = vec![T::one(); mass.len()];
        let whitened = stiffness.scale(&inv_sqrt, &inv_sqrt);
        let precision = stiffness.scale(&ones, &inv).matmul(&stiffness);
        let phi0 = compute_phi0(&mass);
        Self { mass, stiffness, whitened, precision, phi0 }
    }

    pub fn size(&self) -> usize {
        self.mass.len()
    }

    /// Diagonal of the lumped mass matrix `M`.
    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    /// `F`
    pub fn stiffness(&self) -> &CsrMatrix<T> {
        &self.stiffness
    }

    /// `S = M^{-1/2} F M^{-1/2}`
    pub fn whitened(&self) -> &CsrMatrix<T> {
        &self.whitened
    }

    /// `Q = F M⁻¹ F`
    pub fn precision(&self) -> &CsrMatrix<T> {
        &self.precision
    }

    pub fn phi0(&self) -> &[T] {
        &self.phi0
    }

    /// `u = M φ0`
    pub fn mass_phi0(&self) -> Vec<T> {
        self.mass.iter().zip(&self.phi0).map(|(&a, &b)| a * b).collect()
    }

    /// Unit kernel vector of `S`: `w = M^{1/2} φ0`.
    pub fn kernel(&self) -> Vec<T> {
        self.mass.iter().zip(&self.phi0).map(|(&a, &b)| a.sqrt() * b).collect()
    }

    pub fn total_area(&self) -> T {
        self.mass.iter().copied().sum()
    }

    pub fn pinv(&self, backend: PinvBackend) -> Result<WhitenedPinv<T>, SolverError> {
        WhitenedPinv::new(&self.stiffness, &self.mass, backend)
    }
}

/// `φ0 = 1 / ‖M^{1/2} 1‖` on every node, so that `φ0ᵀ M φ0 = 1`.
pub fn compute_phi0<T: Real>(mass: &[T]) -> Vec<T> {
    let c = T::one() / mass.iter().copied().sum::<T>().sqrt();
    vec![c; mass.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let pi = std::f64::consts::PI;
        let a = AnisotropyParams::new(0.3, -1.0).unwrap().canonical();
        assert!((a.angle - (0.3 + pi / 2.0 - pi)).abs() < 1e-12);
        assert_eq!(a.log_ratio, 1.0);
        let b = AnisotropyParams::new(pi / 2.0, 0.5).unwrap().canonical();
        assert!((b.angle - pi / 2.0).abs() < 1e-12);
        let c = AnisotropyParams::new(-pi / 2.0, 0.5).unwrap().canonical();
        assert!((c.angle - pi / 2.0).abs() < 1e-12);
    }

    #[test]
    fn transform_has_unit_determinant() {
        let t = AnisotropyParams::<f64>::new(0.7, 1.3).unwrap().transform();
        let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
        assert!((det - 1.0).abs() < 1e-12);
    }
}
