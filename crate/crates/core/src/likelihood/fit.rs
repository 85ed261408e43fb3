//! Multistart Nelder–Mead over the anisotropy (and optionally `log τ`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fem::{assemble, AnisotropyParams};
use crate::mesh::{bind_observations, BoundObservations, ObservationSet, TriangleMesh};
use crate::scalar::Real;
use crate::solver::PinvBackend;

use super::{concentrated_loglik, nelder_mead, FitError, LikelihoodValue, NelderMeadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnisotropyMode {
    /// Isotropic metric.
    None,
    /// Metric held at the given parameters.
    Fixed(AnisotropyParams<f64>),
    /// Angle and log-ratio estimated.
    Fit,
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub anisotropy: AnisotropyMode,
    /// Estimate `τ` in log space (requires `τ > 0` observations).
    pub estimate_tau: bool,
    pub nelder_mead: NelderMeadOptions,
    /// `(angle, log_ratio)` starting points; `None` uses five fixed starts.
    pub starts: Option<Vec<[f64; 2]>>,
    pub pinv_backend: PinvBackend,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            anisotropy: AnisotropyMode::Fit,
            estimate_tau: false,
            nelder_mead: NelderMeadOptions::default(),
            starts: None,
            pinv_backend: PinvBackend::default(),
        }
    }
}

/// Fixed starting points in `(angle, log_ratio)`.
pub const DEFAULT_STARTS: [[f64; 2]; 5] = [
    [0.0, 0.0],
    [0.0, 1.0],
    [std::f64::consts::FRAC_PI_4, 1.0],
    [-std::f64::consts::FRAC_PI_4, 1.0],
    [std::f64::consts::FRAC_PI_2, 1.0],
];

const ANGLE_STEP: f64 = 0.4;
const RATIO_STEP: f64 = 0.5;
const LOG_TAU_STEP: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub start: usize,
    pub angle: f64,
    pub log_ratio: f64,
    pub tau: f64,
    /// Concentrated log-likelihood (`-inf` when the evaluation failed).
    pub loglik: f64,
    pub best_so_far: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartReport {
    pub initial: Vec<f64>,
    pub best_loglik: f64,
    pub evals: usize,
    pub converged: bool,
    pub first_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub beta_hat: AnisotropyParams<f64>,
    pub sigma_hat: f64,
    pub a_hat: f64,
    pub tau_hat: f64,
    pub loglik: f64,
    pub sigma_floored: bool,
    pub n_observations: usize,
    pub anisotropy: AnisotropyMode,
    pub estimate_tau: bool,
    pub starts: Vec<StartReport>,
    pub trace: Vec<TraceEntry>,
}

/// Concentrated log-likelihood for given parameters; assembles the operators.
pub fn evaluate<T: Real>(
    mesh: &TriangleMesh<T>,
    bound: &BoundObservations<T>,
    y: &[T],
    beta: Option<&AnisotropyParams<T>>,
    tau: T,
    backend: PinvBackend,
) -> Result<LikelihoodValue<T>, FitError> {
    let ops = assemble(mesh, beta)?;
    let pinv = ops.pinv(backend)?;
    concentrated_loglik(&ops, &pinv, bound, y, tau)
}

struct Layout {
    aniso: bool,
    tau: bool,
}

impl Layout {
    fn unpack(&self, x: &[f64], mode: &AnisotropyMode, tau0: f64) -> (Option<AnisotropyParams<f64>>, f64) {
        let (beta, rest) = match mode {
            AnisotropyMode::Fit => (Some(AnisotropyParams { angle: x[0], log_ratio: x[1] }), &x[2..]),
            AnisotropyMode::Fixed(b) => (Some(*b), x),
            AnisotropyMode::None => (None, x),
        };
        let tau = if self.tau { rest[0].exp() } else { tau0 };
        (beta, tau)
    }
}

/// Maximizes the concentrated log-likelihood.
pub fn fit<T: Real>(mesh: &TriangleMesh<T>, obs: &ObservationSet<T>, opts: &FitOptions) -> Result<FitResult, FitError> {
    let bound = bind_observations(mesh, obs)?;
    fit_bound(mesh, &bound, &obs.values, opts)
}

/// As [`fit`], with observations already bound.
pub fn fit_bound<T: Real>(
    mesh: &TriangleMesh<T>,
    bound: &BoundObservations<T>,
    y: &[T],
    opts: &FitOptions,
) -> Result<FitResult, FitError> {
    let n = bound.len();
    if n < 3 {
        return Err(FitError::InvalidInput(format!("need at least 3 observations, got {n}")));
    }
    let tau0 = bound.tau().as_f64();
    if opts.estimate_tau && !(tau0 > 0.0) {
        return Err(FitError::InvalidInput("estimating τ needs a positive initial τ".into()));
    }
    if opts.anisotropy != AnisotropyMode::None && mesh.chart().is_none() {
        return Err(FitError::Fem(crate::fem::FemError::MissingChart));
    }
    let layout = Layout { aniso: opts.anisotropy == AnisotropyMode::Fit, tau: opts.estimate_tau };

    let mut starts: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    if layout.aniso {
        for s in opts.starts.clone().unwrap_or_else(|| DEFAULT_STARTS.to_vec()) {
            let mut x = s.to_vec();
            let mut step = vec![ANGLE_STEP, RATIO_STEP];
            if layout.tau {
                x.push(tau0.ln());
                step.push(LOG_TAU_STEP);
            }
            starts.push((x, step));
        }
    } else if layout.tau {
        for off in [0.0, -1.0, 1.0, -2.0, 2.0] {
            starts.push((vec![tau0.ln() + off], vec![LOG_TAU_STEP]));
        }
    }

    let objective = |x: &[f64]| -> Result<LikelihoodValue<T>, FitError> {
        let (beta, tau) = layout.unpack(x, &opts.anisotropy, tau0);
        let beta_t = beta.map(|b| AnisotropyParams { angle: T::lit(b.angle), log_ratio: T::lit(b.log_ratio) });
        evaluate(mesh, bound, y, beta_t.as_ref(), T::lit(tau), opts.pinv_backend)
    };

    let mut trace = Vec::new();
    let mut reports = Vec::new();
    let mut best_x: Vec<f64> = Vec::new();
    let mut best_f = f64::INFINITY;

    if starts.is_empty() {
        let v = objective(&[])?;
        best_f = -v.value.as_f64();
        let (beta, tau) = layout.unpack(&[], &opts.anisotropy, tau0);
        let b = beta.unwrap_or_else(AnisotropyParams::isotropic);
        trace.push(TraceEntry {
            start: 0,
            angle: b.angle,
            log_ratio: b.log_ratio,
            tau,
            loglik: -best_f,
            best_so_far: -best_f,
        });
        reports.push(StartReport { initial: vec![], best_loglik: -best_f, evals: 1, converged: true, first_error: None });
    } else {
        let runs: Vec<_> = starts
            .par_iter()
            .map(|(x0, step)| {
                let mut first_error = None;
                let r = nelder_mead(
                    |x| match objective(x) {
                        Ok(v) => -v.value.as_f64(),
                        Err(e) => {
                            first_error.get_or_insert_with(|| e.to_string());
                            f64::INFINITY
                        }
                    },
                    x0,
                    step,
                    &opts.nelder_mead,
                );
                (r, first_error)
            })
            .collect();
        let mut running = f64::NEG_INFINITY;
        for (i, ((x0, _), (r, err))) in starts.iter().zip(runs).enumerate() {
            for (x, f) in &r.history {
                let (beta, tau) = layout.unpack(x, &opts.anisotropy, tau0);
                let b = beta.unwrap_or_else(AnisotropyParams::isotropic);
                running = running.max(-f);
                trace.push(TraceEntry {
                    start: i,
                    angle: b.angle,
                    log_ratio: b.log_ratio,
                    tau,
                    loglik: -f,
                    best_so_far: running,
                });
            }
            reports.push(StartReport {
                initial: x0.clone(),
                best_loglik: -r.f,
                evals: r.evals,
                converged: r.converged,
                first_error: err,
            });
            if r.f < best_f {
                best_f = r.f;
                best_x = r.x.clone();
            }
        }
        if !best_f.is_finite() {
            let msgs: Vec<String> = reports
                .iter()
                .enumerate()
                .map(|(i, r)| format!("start {i}: {}", r.first_error.as_deref().unwrap_or("no finite objective")))
                .collect();
            return Err(FitError::AllStartsFailed(msgs.join("; ")));
        }
    }

    let (beta, tau_hat) = layout.unpack(&best_x, &opts.anisotropy, tau0);
    let beta_hat = beta.map(|b| b.canonical());
    let final_value = objective_at(mesh, bound, y, beta_hat, tau_hat, opts.pinv_backend)?;
    Ok(FitResult {
        beta_hat: beta_hat.unwrap_or_else(AnisotropyParams::isotropic),
        sigma_hat: final_value.sigma_star.as_f64(),
        a_hat: final_value.a_star.as_f64(),
        tau_hat,
        loglik: final_value.value.as_f64(),
        sigma_floored: final_value.sigma_floored,
        n_observations: n,
        anisotropy: opts.anisotropy,
        estimate_tau: opts.estimate_tau,
        starts: reports,
        trace,
    })
}

fn objective_at<T: Real>(
    mesh: &TriangleMesh<T>,
    bound: &BoundObservations<T>,
    y: &[T],
    beta: Option<AnisotropyParams<f64>>,
    tau: f64,
    backend: PinvBackend,
) -> Result<LikelihoodValue<T>, FitError> {
    let beta_t = beta.map(|b| AnisotropyParams { angle: T::lit(b.angle), log_ratio: T::lit(b.log_ratio) });
    evaluate(mesh, bound, y, beta_t.as_ref(), T::lit(tau), backend)
}
