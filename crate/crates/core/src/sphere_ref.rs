//! Closed-form reference on the unit sphere: the truncated kernel
//! `K₁(s, s′) = Σ_{l=1..K} (2l+1) / (4π l²(l+1)²) · P_l(s·s′)` and exact
//! universal kriging with the constant trend `φ0 = 1/√(4π)`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SphereError {
    #[error("truncation degree must be in 1..=200, got {0}")]
    Truncation(usize),
    #[error("point {index} is not on the unit sphere (norm {norm})")]
    NotUnit { index: usize, norm: f64 },
    #[error(
        "kernel matrix K₁,τ is singular; with τ = 0 the observations must be at distinct points \
         so that the data can be interpolated"
    )]
    SingularKernelMatrix,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub const MAX_DEGREE: usize = 200;

/// Truncated spline kernel on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereKernel<T> {
    weights: Vec<T>,
}

impl<T: Real> SphereKernel<T> {
    pub fn new(degree: usize) -> Result<Self, SphereError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(SphereError::Truncation(degree));
        }
        let four_pi = T::lit(4.0) * T::pi();
        let weights = (1..=degree)
            .map(|l| {
                let l = T::from_count(l);
                (T::lit(2.0) * l + T::one()) / (four_pi * l * l * (l + T::one()) * (l + T::one()))
            })
            .collect();
        Ok(Self { weights })
    }

    pub fn degree(&self) -> usize {
        self.weights.len()
    }

    /// `w_l` for `l = 1..=K`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `Σ w_l P_l(x)` for `x = cos γ`.
    pub fn of_cosine(&self, x: T) -> T {
        let x = x.max(-T::one()).min(T::one());
        let (mut p_prev, mut p) = (T::one(), x);
        let mut acc = self.weights[0] * p;
        for l in 1..self.weights.len() {
            let lf = T::from_count(l);
            let next = ((T::lit(2.0) * lf + T::one()) * x * p - lf * p_prev) / (lf + T::one());
            p_prev = p;
            p = next;
            acc += self.weights[l] * p;
        }
        acc
    }

    pub fn value(&self, s1: [T; 3], s2: [T; 3]) -> Result<T, SphereError> {
        check_unit(0, s1)?;
        check_unit(1, s2)?;
        Ok(self.of_cosine(s1[0] * s2[0] + s1[1] * s2[1] + s1[2] * s2[2]))
    }
}

fn check_unit<T: Real>(index: usize, s: [T; 3]) -> Result<(), SphereError> {
    let norm = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
    if !((norm - T::one()).abs() <= T::lit(1e-8)) {
        return Err(SphereError::NotUnit { index, norm: norm.as_f64() });
    }
    Ok(())
}

fn cosine<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `φ0 = 1/√(4π)`, the unit-norm constant on the unit sphere.
pub fn sphere_phi0<T: Real>() -> T {
    T::one() / (T::lit(4.0) * T::pi()).sqrt()
}

/// Universal kriging on the sphere with unit `σ²`; callers scale variances
/// and covariances by `σ²`.
#[derive(Debug, Clone)]
pub struct SphereKriging<T: Real> {
    kernel: SphereKernel<T>,
    points: Vec<[T; 3]>,
    chol: Cholesky<T, Dyn>,
    /// `K⁻¹ (y − a φ)`
    weights: DVector<T>,
    /// `K⁻¹ φ`
    k_phi: DVector<T>,
    /// `φᵀ K⁻¹ φ`
    phi_k_phi: T,
    a: T,
}

impl<T: Real> SphereKriging<T> {
    pub fn new(kernel: SphereKernel<T>, points: Vec<[T; 3]>, y: &[T], tau: T) -> Result<Self, SphereError> {
        let n = points.len();
        if n == 0 || y.len() != n {
            return Err(SphereError::InvalidInput(format!("{n} points for {} values", y.len())));
        }
        if !(tau >= T::zero()) {
            return Err(SphereError::InvalidInput("tau must be non-negative".into()));
        }
        for (i, &p) in points.iter().enumerate() {
            check_unit(i, p)?;
        }
        let mut k = DMatrix::from_fn(n, n, |i, j| kernel.of_cosine(cosine(points[i], points[j])));
        for i in 0..n {
            k[(i, i)] += tau * tau;
        }
        let diag_max = (0..n).fold(T::zero(), |a, i| a.max(k[(i, i)]));
        let chol = k.cholesky().ok_or(SphereError::SingularKernelMatrix)?;
        let l = chol.l_dirty();
        if (0..n).any(|i| !(l[(i, i)] * l[(i, i)] > T::lit(1e-13) * diag_max)) {
            return Err(SphereError::SingularKernelMatrix);
        }
        let phi = DVector::from_element(n, sphere_phi0::<T>());
        let yv = DVector::from_column_slice(y);
        let k_phi = chol.solve(&phi);
        let phi_k_phi = phi.dot(&k_phi);
        let a = k_phi.dot(&yv) / phi_k_phi;
        let weights = chol.solve(&(&yv - &phi * a));
        Ok(Self { kernel, points, chol, weights, k_phi, phi_k_phi, a })
    }

    /// Trend coefficient `a_τ` (the trend is `a_τ φ0`).
    pub fn trend_coefficient(&self) -> T {
        self.a
    }

    fn k_vec(&self, s: [T; 3]) -> DVector<T> {
        DVector::from_iterator(self.points.len(), self.points.iter().map(|&p| self.kernel.of_cosine(cosine(p, s))))
    }

    pub fn mean(&self, s: [T; 3]) -> Result<T, SphereError> {
        check_unit(0, s)?;
        Ok(self.a * sphere_phi0::<T>() + self.k_vec(s).dot(&self.weights))
    }

    /// `v(s) = φ0 − φᵀ K⁻¹ k(s)`
    fn trend_residual(&self, k: &DVector<T>) -> T {
        sphere_phi0::<T>() - self.k_phi.dot(k)
    }

    /// Conditional covariance `c(s,s′) + K₁(s,s′) − k(s)ᵀK⁻¹k(s′)`,
    /// `c(s,s′) = v(s)v(s′) / φᵀK⁻¹φ`.
    pub fn covariance(&self, s: [T; 3], s_prime: [T; 3]) -> Result<T, SphereError> {
        check_unit(0, s)?;
        check_unit(1, s_prime)?;
        let ks = self.k_vec(s);
        let kt = self.k_vec(s_prime);
        let c = self.trend_residual(&ks) * self.trend_residual(&kt) / self.phi_k_phi;
        let quad = ks.dot(&self.chol.solve(&kt));
        Ok(c + self.kernel.of_cosine(cosine(s, s_prime)) - quad)
    }

    pub fn variance(&self, s: [T; 3]) -> Result<T, SphereError> {
        Ok(self.covariance(s, s)?.max(T::zero()))
    }
}

/// Means and variances (unit `σ²`) at `targets`.
pub fn kriging_predict<T: Real>(
    kernel: &SphereKernel<T>,
    obs_points: &[[T; 3]],
    y: &[T],
    tau: T,
    targets: &[[T; 3]],
) -> Result<(Vec<T>, Vec<T>), SphereError> {
    let kr = SphereKriging::new(kernel.clone(), obs_points.to_vec(), y, tau)?;
    let mut means = Vec::with_capacity(targets.len());
    let mut vars = Vec::with_capacity(targets.len());
    for &t in targets {
        means.push(kr.mean(t)?);
        vars.push(kr.variance(t)?);
    }
    Ok((means, vars))
}

pub fn conditional_covariance<T: Real>(
    kernel: &SphereKernel<T>,
    obs_points: &[[T; 3]],
    tau: T,
    s: [T; 3],
    s_prime: [T; 3],
) -> Result<T, SphereError> {
    let y = vec![T::zero(); obs_points.len()];
    SphereKriging::new(kernel.clone(), obs_points.to_vec(), &y, tau)?.covariance(s, s_prime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn degree_one_closed_form() {
        let k = SphereKernel::<f64>::new(1).unwrap();
        let x = 0.3;
        assert!((k.of_cosine(x) - 3.0 / (16.0 * PI) * x).abs() < 1e-15);
    }

    #[test]
    fn legendre_endpoints() {
        let k = SphereKernel::<f64>::new(40).unwrap();
        let same: f64 = (1..=40).map(|l| (2 * l + 1) as f64 / (4.0 * PI * (l * l * (l + 1) * (l + 1)) as f64)).sum();
        let anti: f64 = (1..=40)
            .map(|l| if l % 2 == 0 { 1.0 } else { -1.0 } * (2 * l + 1) as f64 / (4.0 * PI * (l * l * (l + 1) * (l + 1)) as f64))
            .sum();
        assert!((k.of_cosine(1.0) - same).abs() < 1e-14);
        assert!((k.of_cosine(-1.0) - anti).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(SphereKernel::<f64>::new(0).is_err());
        assert!(SphereKernel::<f64>::new(201).is_err());
        let k = SphereKernel::<f64>::new(5).unwrap();
        assert!(matches!(k.value([1.0, 0.1, 0.0], [1.0, 0.0, 0.0]), Err(SphereError::NotUnit { .. })));
    }

    #[test]
    fn duplicate_points_singular_without_noise() {
        let k = SphereKernel::<f64>::new(10).unwrap();
        let p = [0.0, 0.0, 1.0];
        let err = SphereKriging::new(k, vec![p, p], &[1.0, 2.0], 0.0).unwrap_err();
        assert_eq!(err, SphereError::SingularKernelMatrix);
    }
}
