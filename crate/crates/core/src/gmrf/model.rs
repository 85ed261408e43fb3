use log::warn;

use crate::fem::FemOperators;
use crate::mesh::{BoundObservations, Scenario};
use crate::scalar::{dot, Real};
use crate::solver::{
    estimate_spectral_bounds, MinEigenMethod, PinvBackend, RankOneSystem, SpdFactor, SpectralBounds,
    SpectralOptions, WhitenedPinv,
};

use super::{GmrfError, SolverContext};

#[derive(Debug, Clone)]
pub struct ModelOptions<T> {
    /// Working α; `None` picks `σ² / (λ₁ λ_{m−1})`.
    pub alpha: Option<T>,
    pub pinv_backend: PinvBackend,
    pub spectral: SpectralOptions,
    /// Precomputed `(λ₁, λ_{m−1})` of the whitened operator; skips estimation.
    pub bounds: Option<SpectralBounds<T>>,
}

impl<T> Default for ModelOptions<T> {
    fn default() -> Self {
        Self {
            alpha: None,
            pinv_backend: PinvBackend::default(),
            spectral: SpectralOptions::default(),
            bounds: None,
        }
    }
}

#[derive(Debug, Clone)]
enum MeanSolver<T> {
    /// `(Q_ĪĪ + (σ²/α) u_Ī u_Īᵀ) x = −(Q_ĪI y + (σ²/α) u_Ī u_Iᵀ y)`
    Interpolation { system: RankOneSystem<T>, nodes: Vec<usize>, complement: Vec<usize> },
    /// `(τ²Q + PᵀP + (σ²τ²/α) u uᵀ) ω = Pᵀ y`
    Smoothing { system: RankOneSystem<T> },
}

/// Posterior model of the intrinsic field given bound observations.
#[derive(Debug, Clone)]
pub struct PosteriorModel<T> {
    ops: FemOperators<T>,
    bound: BoundObservations<T>,
    y: Vec<T>,
    sigma: T,
    alpha: T,
    u: Vec<T>,
    pinv: WhitenedPinv<T>,
    bounds: SpectralBounds<T>,
    alpha_warning: Option<String>,
    opts: ModelOptions<T>,
    solver: MeanSolver<T>,
    /// `h[m_α(Pφ0)]`
    h: Vec<T>,
    /// `(Mφ0)ᵀ m_α(Pφ0)`
    t: T,
}

impl<T: Real> PosteriorModel<T> {
    pub fn new(
        ops: FemOperators<T>,
        bound: BoundObservations<T>,
        y: Vec<T>,
        sigma: T,
        opts: &ModelOptions<T>,
    ) -> Result<Self, GmrfError> {
        let m = ops.size();
        if bound.num_nodes() != m {
            return Err(GmrfError::InvalidInput(format!(
                "observations bound to {} nodes, operators have {m}",
                bound.num_nodes()
            )));
        }
        if y.len() != bound.len() {
            return Err(GmrfError::InvalidInput(format!("{} values for {} observations", y.len(), bound.len())));
        }
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(GmrfError::InvalidInput("sigma must be positive".into()));
        }
        let pinv = ops.pinv(opts.pinv_backend).context("pseudo-inverse of the whitened operator")?;
        let bounds = match opts.bounds {
            Some(b) => b,
            None => estimate_spectral_bounds(
                ops.whitened(),
                pinv.kernel(),
                MinEigenMethod::InverseIteration(&pinv),
                &opts.spectral,
            )
            .context("spectral bounds")?,
        };
        let alpha = match opts.alpha {
            Some(a) if a > T::zero() && a.is_finite() => a,
            Some(_) => return Err(GmrfError::InvalidInput("alpha must be positive".into())),
            None => sigma * sigma / (bounds.lambda_min_pos * bounds.lambda_max),
        };
        let ratio = sigma / alpha.sqrt();
        let alpha_warning = if ratio < bounds.lambda_min_pos || ratio > bounds.lambda_max {
            let msg = format!(
                "σ/√α = {:e} lies outside [λ₁, λ_max] = [{:e}, {:e}]; the working system may be ill-conditioned",
                ratio.as_f64(),
                bounds.lambda_min_pos.as_f64(),
                bounds.lambda_max.as_f64()
            );
            warn!("{msg}");
            Some(msg)
        } else {
            None
        };
        let u = ops.mass_phi0();
        let solver = Self::build_solver(&ops, &bound, &u, sigma, alpha)?;
        let mut model = Self {
            ops,
            bound,
            y,
            sigma,
            alpha,
            u,
            pinv,
            bounds,
            alpha_warning,
            opts: ModelOptions { bounds: Some(bounds), ..opts.clone() },
            solver,
            h: Vec::new(),
            t: T::zero(),
        };
        let p_phi0 = model.bound.project(model.ops.phi0());
        let mp = model.posterior_mean_alpha(&p_phi0)?;
        let t = dot(&model.u, &mp);
        let tol = T::lit(1e-12);
        if t.abs() <= tol || (T::one() - t).abs() <= tol {
            return Err(GmrfError::MeanCorrectionSingular { t: t.as_f64() });
        }
        let phi0 = model.ops.phi0();
        model.h = mp.iter().zip(phi0).map(|(&v, &p)| (v - p * t) / (T::one() - t)).collect();
        model.t = t;
        Ok(model)
    }

    fn build_solver(
        ops: &FemOperators<T>,
        bound: &BoundObservations<T>,
        u: &[T],
        sigma: T,
        alpha: T,
    ) -> Result<MeanSolver<T>, GmrfError> {
        let q = ops.precision();
        match bound.scenario() {
            Scenario::Interpolation => {
                let nodes = bound.nodes().expect("interpolation binds node indices").to_vec();
                let complement = bound.complement().to_vec();
                if complement.is_empty() {
                    return Err(GmrfError::InvalidInput("every node is observed; nothing to predict".into()));
                }
                let qbb = q.submatrix(&complement, &complement);
                let factor = SpdFactor::new(&qbb).context("factorizing Q on unobserved nodes")?;
                let ub: Vec<T> = complement.iter().map(|&j| u[j]).collect();
                let system =
                    RankOneSystem::new(factor, ub, sigma * sigma / alpha).context("rank-one update of Q_ĪĪ")?;
                Ok(MeanSolver::Interpolation { system, nodes, complement })
            }
            Scenario::Smoothing => {
                let tau = bound.tau();
                let p = bound.projection();
                let ptp = p.transpose().matmul(p);
                let base = q.scaled(tau * tau).add_scaled(T::one(), &ptp);
                let factor = SpdFactor::new(&base).context("factorizing τ²Q + PᵀP")?;
                let system = RankOneSystem::new(factor, u.to_vec(), sigma * sigma * tau * tau / alpha)
                    .context("rank-one update of τ²Q + PᵀP")?;
                Ok(MeanSolver::Smoothing { system })
            }
        }
    }

    /// Same data and operators with another working α.
    pub fn with_alpha(&self, alpha: T) -> Result<Self, GmrfError> {
        let opts = ModelOptions { alpha: Some(alpha), ..self.opts.clone() };
        Self::new(self.ops.clone(), self.bound.clone(), self.y.clone(), self.sigma, &opts)
    }

    /// Same operators and bindings with new observation values.
    pub fn with_observations(&self, y: Vec<T>) -> Result<Self, GmrfError> {
        let opts = ModelOptions { alpha: Some(self.alpha), ..self.opts.clone() };
        Self::new(self.ops.clone(), self.bound.clone(), y, self.sigma, &opts)
    }

    pub fn ops(&self) -> &FemOperators<T> {
        &self.ops
    }

    pub fn bound(&self) -> &BoundObservations<T> {
        &self.bound
    }

    pub fn observations(&self) -> &[T] {
        &self.y
    }

    pub fn scenario(&self) -> Scenario {
        self.bound.scenario()
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn tau(&self) -> T {
        self.bound.tau()
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn spectral_bounds(&self) -> SpectralBounds<T> {
        self.bounds
    }

    pub fn alpha_warning(&self) -> Option<&str> {
        self.alpha_warning.as_deref()
    }

    pub fn pinv(&self) -> &WhitenedPinv<T> {
        &self.pinv
    }

    /// `u = M φ0`
    pub fn mass_phi0(&self) -> &[T] {
        &self.u
    }

    fn check_rhs(&self, rhs: &[T]) -> Result<(), GmrfError> {
        if rhs.len() != self.bound.len() {
            return Err(GmrfError::InvalidInput(format!(
                "right-hand side has {} entries, expected {}",
                rhs.len(),
                self.bound.len()
            )));
        }
        Ok(())
    }

    /// `m_α(x) = Q̃_α⁻¹ Pᵀ (P Q̃_α⁻¹ Pᵀ + σ²τ² I)⁻¹ x`
    pub fn posterior_mean_alpha(&self, rhs: &[T]) -> Result<Vec<T>, GmrfError> {
        self.check_rhs(rhs)?;
        let m = self.ops.size();
        match &self.solver {
            MeanSolver::Interpolation { system, nodes, complement } => {
                let mut x = vec![T::zero(); m];
                for (&j, &v) in nodes.iter().zip(rhs) {
                    x[j] = v;
                }
                let q_x = self.ops.precision().mul_vec(&x);
                let uty = nodes.iter().zip(rhs).map(|(&j, &v)| self.u[j] * v).sum::<T>();
                let beta = system.beta();
                let b: Vec<T> = complement
                    .iter()
                    .zip(system.u())
                    .map(|(&j, &ub)| -(q_x[j] + beta * ub * uty))
                    .collect();
                let xb = system.solve(&b);
                for (&j, &v) in complement.iter().zip(&xb) {
                    x[j] = v;
                }
                Ok(x)
            }
            MeanSolver::Smoothing { system } => Ok(system.solve(&self.bound.project_t(rhs))),
        }
    }

    /// Restores `m_I = rhs` exactly in the interpolation scenario, where the
    /// corrections vanish on `I` analytically.
    fn pin_observed(&self, rhs: &[T], v: &mut [T]) {
        if let MeanSolver::Interpolation { nodes, .. } = &self.solver {
            for (&j, &x) in nodes.iter().zip(rhs) {
                v[j] = x;
            }
        }
    }

    /// Limit `m_post(x) = lim_{α→∞} m_α(x)`:
    /// `m_α(x) + (φ0 − h)(1/t − 1)(uᵀ m_α(x))`.
    pub fn posterior_mean(&self, rhs: &[T]) -> Result<Vec<T>, GmrfError> {
        let ma = self.posterior_mean_alpha(rhs)?;
        let c = dot(&self.u, &ma) * (T::one() / self.t - T::one());
        let mut out: Vec<T> =
            ma.iter().zip(self.ops.phi0()).zip(&self.h).map(|((&v, &p), &h)| v + c * (p - h)).collect();
        self.pin_observed(rhs, &mut out);
        Ok(out)
    }

    /// `m_post(y)`
    pub fn mean(&self) -> Result<Vec<T>, GmrfError> {
        self.posterior_mean(&self.y)
    }

    /// Generalized-least-squares trend coefficient `a_τ = uᵀ m_α(y) / t`.
    pub fn trend_coefficient(&self) -> Result<T, GmrfError> {
        Ok(dot(&self.u, &self.posterior_mean_alpha(&self.y)?) / self.t)
    }

    /// Simple-kriging operator with the trend fixed: `m_α(x) + (h − φ0)(uᵀ m_α(x))`.
    pub fn simple_kriging_mean(&self, rhs: &[T]) -> Result<Vec<T>, GmrfError> {
        let ma = self.posterior_mean_alpha(rhs)?;
        let c = dot(&self.u, &ma);
        let mut out: Vec<T> =
            ma.iter().zip(self.ops.phi0()).zip(&self.h).map(|((&v, &p), &h)| v + c * (h - p)).collect();
        self.pin_observed(rhs, &mut out);
        Ok(out)
    }

    /// `z_a = a φ0 + z − φ0 (Mφ0)ᵀ z` with `z ~ N(0, Q̃_α⁻¹)` built from `eps`.
    pub fn simulate_prior(&self, a: T, eps: &[T]) -> Result<Vec<T>, GmrfError> {
        let sampler = crate::solver::PrecisionSampler::new(&self.pinv, self.ops.phi0(), self.sigma, self.alpha)
            .context("prior sampler")?;
        let z = sampler.sample(eps).context("prior sample")?;
        let c = dot(&self.u, &z);
        Ok(z.iter().zip(self.ops.phi0()).map(|(&zi, &p)| a * p + zi - p * c).collect())
    }
}
