//! Solves with `A + β u uᵀ` through the Sherman–Morrison formula.

use crate::scalar::{dot, Real};

use super::{SolverError, SpdFactor};

/// `A + beta · u uᵀ` with `A` held as a sparse factor.
#[derive(Debug, Clone)]
pub struct RankOneSystem<T> {
    base: SpdFactor<T>,
    u: Vec<T>,
    beta: T,
    a_inv_u: Vec<T>,
    denom: T,
}

impl<T: Real> RankOneSystem<T> {
    pub fn new(base: SpdFactor<T>, u: Vec<T>, beta: T) -> Result<Self, SolverError> {
        if u.len() != base.size() {
            return Err(SolverError::DimensionMismatch { expected: base.size(), found: u.len() });
        }
        let a_inv_u = base.solve(&u);
        let denom = T::one() + beta * dot(&u, &a_inv_u);
        if denom.abs() <= T::lit(1e-12) {
            return Err(SolverError::IllPosedUpdate { denominator: denom.as_f64() });
        }
        Ok(Self { base, u, beta, a_inv_u, denom })
    }

    pub fn base(&self) -> &SpdFactor<T> {
        &self.base
    }

    pub fn u(&self) -> &[T] {
        &self.u
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn size(&self) -> usize {
        self.u.len()
    }

    /// `x = A⁻¹b − (β uᵀA⁻¹b)/(1 + β uᵀA⁻¹u) · A⁻¹u`
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = self.base.solve(b);
        let c = self.beta * dot(&self.u, &x) / self.denom;
        for (xi, &vi) in x.iter_mut().zip(&self.a_inv_u) {
            *xi -= c * vi;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::CsrMatrix;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_beta_is_base_solve() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 3.0), (1, 1, 2.0), (0, 1, 1.0), (1, 0, 1.0)]);
        let f = SpdFactor::new(&a).unwrap();
        let sys = RankOneSystem::new(f.clone(), vec![1.0, 5.0], 0.0).unwrap();
        assert_eq!(sys.solve(&[1.0, 2.0]), f.solve(&[1.0, 2.0]));
    }

    #[test]
    fn identity_plus_e1() {
        let f = SpdFactor::new(&CsrMatrix::<f64>::identity(3)).unwrap();
        let sys = RankOneSystem::new(f, vec![1.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(sys.solve(&[1.0, 0.0, 0.0]), vec![0.5, 0.0, 0.0]);
    }

    #[test]
    fn random_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 20;
        let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let a = &b * b.transpose() + DMatrix::identity(n, n) * 0.5;
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let beta = 2.5;
        let sys = RankOneSystem::new(SpdFactor::new(&CsrMatrix::from_dense(&a)).unwrap(), u.clone(), beta).unwrap();
        let uv = DVector::from_vec(u);
        let full = &a + &uv * uv.transpose() * beta;
        let expect = full.lu().solve(&DVector::from_vec(rhs.clone())).unwrap();
        let x = DVector::from_vec(sys.solve(&rhs));
        assert!((x - &expect).norm() <= 1e-9 * expect.norm());
    }

    #[test]
    fn singular_update_rejected() {
        let f = SpdFactor::new(&CsrMatrix::<f64>::identity(2)).unwrap();
        let err = RankOneSystem::new(f, vec![1.0, 0.0], -1.0).unwrap_err();
        assert!(matches!(err, SolverError::IllPosedUpdate { .. }));
    }
}
