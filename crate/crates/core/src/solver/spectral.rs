//! Extreme nonzero eigenvalues of the whitened operator, used to keep the
//! working α inside the well-conditioned band.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{dot, norm2, Real};

use super::{CsrMatrix, SolverError, WhitenedPinv};

#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    /// Eigen-residual target `‖Sv − λv‖ ≤ tol · λ`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { tol: 1e-4, max_iter: 10_000, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBounds<T> {
    /// Smallest nonzero eigenvalue `λ₁`.
    pub lambda_min_pos: T,
    /// Largest eigenvalue `λ_{m−1}`.
    pub lambda_max: T,
}

/// Method for the smallest nonzero eigenvalue.
#[derive(Debug, Clone, Copy)]
pub enum MinEigenMethod<'a, T> {
    /// Power iteration on `λ_max I − S` with the kernel deflated.
    ShiftedPower,
    /// Power iteration on `S⁺`.
    InverseIteration(&'a WhitenedPinv<T>),
}

fn start_vector<T: Real>(n: usize, w: &[T], seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<T> = (0..n).map(|_| T::lit(rng.random_range(-1.0..1.0))).collect();
    deflate(&mut v, w);
    normalize(&mut v);
    v
}

fn deflate<T: Real>(v: &mut [T], w: &[T]) {
    let c = dot(v, w);
    for (vi, &wi) in v.iter_mut().zip(w) {
        *vi -= c * wi;
    }
}

fn normalize<T: Real>(v: &mut [T]) -> T {
    let n = norm2(v);
    if n > T::zero() {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn residual<T: Real>(sv: &[T], v: &[T], lambda: T) -> T {
    sv.iter().zip(v).map(|(&a, &b)| (a - lambda * b) * (a - lambda * b)).sum::<T>().sqrt()
}

/// Largest eigenvalue of `S` restricted to `w⊥`.
///
/// Stops when the eigen-residual meets `tol`, or when the Rayleigh quotient
/// has stalled (relative growth below `1e-3 · tol²` over 50 iterations), which
/// happens on fine meshes whose top eigenvalues cluster.
pub fn power_iteration_max<T: Real>(
    s: &CsrMatrix<T>,
    w: &[T],
    opts: &SpectralOptions,
) -> Result<(T, usize), SolverError> {
    let n = s.nrows();
    let mut v = start_vector(n, w, opts.seed);
    let mut sv = vec![T::zero(); n];
    let tol = T::lit(opts.tol);
    let stall = T::lit(1e-3 * opts.tol * opts.tol);
    let mut history: Vec<T> = Vec::with_capacity(opts.max_iter);
    let mut res = T::zero();
    let mut lambda = T::zero();
    for it in 0..opts.max_iter {
        s.mul_vec_into(&v, &mut sv);
        deflate(&mut sv, w);
        lambda = dot(&v, &sv);
        res = residual(&sv, &v, lambda);
        if res <= tol * lambda.abs() {
            return Ok((lambda, it + 1));
        }
        history.push(lambda);
        if it >= 50 {
            let old = history[it - 50];
            if (lambda - old).abs() <= stall * lambda.abs() {
                return Ok((lambda, it + 1));
            }
        }
        v.copy_from_slice(&sv);
        if normalize(&mut v) == T::zero() {
            return Ok((T::zero(), it + 1));
        }
    }
    Err(SolverError::NoConvergence {
        method: "power iteration (largest eigenvalue)",
        iterations: opts.max_iter,
        residual: (res / lambda.abs().max(T::lit(1e-300))).as_f64(),
    })
}

/// Smallest nonzero eigenvalue from power iteration on `λ_max I − S`.
pub fn shifted_power_min<T: Real>(
    s: &CsrMatrix<T>,
    w: &[T],
    lambda_max: T,
    opts: &SpectralOptions,
) -> Result<(T, usize), SolverError> {
    let n = s.nrows();
    let mut v = start_vector(n, w, opts.seed ^ 0x1);
    let mut sv = vec![T::zero(); n];
    let tol = T::lit(opts.tol);
    let mut res = T::zero();
    let mut lambda = T::zero();
    for it in 0..opts.max_iter {
        s.mul_vec_into(&v, &mut sv);
        deflate(&mut sv, w);
        lambda = dot(&v, &sv);
        res = residual(&sv, &v, lambda);
        if res <= tol * lambda.abs() {
            return Ok((lambda, it + 1));
        }
        for (vi, &si) in v.iter_mut().zip(&sv) {
            *vi = lambda_max * *vi - si;
        }
        deflate(&mut v, w);
        normalize(&mut v);
    }
    Err(SolverError::NoConvergence {
        method: "shifted power iteration (smallest nonzero eigenvalue)",
        iterations: opts.max_iter,
        residual: (res / lambda.abs().max(T::lit(1e-300))).as_f64(),
    })
}

/// Smallest nonzero eigenvalue from power iteration on `S⁺`.
pub fn inverse_iteration_min<T: Real>(
    s: &CsrMatrix<T>,
    pinv: &WhitenedPinv<T>,
    opts: &SpectralOptions,
) -> Result<(T, usize), SolverError> {
    let n = s.nrows();
    let w = pinv.kernel();
    let mut v = start_vector(n, w, opts.seed ^ 0x2);
    let mut sv = vec![T::zero(); n];
    let tol = T::lit(opts.tol);
    let mut res = T::zero();
    let mut lambda = T::zero();
    for it in 0..opts.max_iter {
        s.mul_vec_into(&v, &mut sv);
        deflate(&mut sv, w);
        lambda = dot(&v, &sv);
        res = residual(&sv, &v, lambda);
        if res <= tol * lambda.abs() {
            return Ok((lambda, it + 1));
        }
        v = pinv.apply(&v)?;
        normalize(&mut v);
    }
    Err(SolverError::NoConvergence {
        method: "inverse iteration (smallest nonzero eigenvalue)",
        iterations: opts.max_iter,
        residual: (res / lambda.abs().max(T::lit(1e-300))).as_f64(),
    })
}

/// `(λ₁, λ_{m−1})` of `S` with `ker S = span(w)`, `‖w‖ = 1`.
pub fn estimate_spectral_bounds<T: Real>(
    s: &CsrMatrix<T>,
    w: &[T],
    method: MinEigenMethod<'_, T>,
    opts: &SpectralOptions,
) -> Result<SpectralBounds<T>, SolverError> {
    if w.len() != s.nrows() {
        return Err(SolverError::DimensionMismatch { expected: s.nrows(), found: w.len() });
    }
    let (lambda_max, _) = power_iteration_max(s, w, opts)?;
    let (lambda_min_pos, _) = match method {
        MinEigenMethod::ShiftedPower => shifted_power_min(s, w, lambda_max, opts)?,
        MinEigenMethod::InverseIteration(p) => inverse_iteration_min(s, p, opts)?,
    };
    Ok(SpectralBounds { lambda_min_pos, lambda_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_diagonal_spectrum() {
        let s = CsrMatrix::<f64>::from_diagonal(&[0.0, 1.0, 4.0]);
        let w = [1.0, 0.0, 0.0];
        let opts = SpectralOptions { tol: 1e-8, ..Default::default() };
        let b = estimate_spectral_bounds(&s, &w, MinEigenMethod::ShiftedPower, &opts).unwrap();
        assert!((b.lambda_min_pos - 1.0).abs() < 1e-6);
        assert!((b.lambda_max - 4.0).abs() < 1e-6);
    }
}
