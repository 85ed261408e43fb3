use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::mesh::Scenario;
use crate::scalar::{dot, Real};

use super::{GmrfError, PosteriorModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimulationKind {
    /// Trend coefficient integrated out (includes the trend-uncertainty term).
    #[serde(rename = "uk")]
    UniversalKriging,
    /// Trend coefficient fixed at its estimate.
    #[serde(rename = "sk")]
    SimpleKriging,
}

/// `n_sims × m` node-wise posterior draws with their provenance.
#[derive(Debug, Clone)]
pub struct SimulationBatch<T> {
    pub samples: Vec<Vec<T>>,
    pub seed: u64,
    pub alpha: T,
    pub sigma: T,
    pub tau: T,
    pub scenario: Scenario,
    pub kind: SimulationKind,
}

fn normals<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vec<T> {
    (0..n)
        .map(|_| {
            let x: f64 = StandardNormal.sample(rng);
            T::lit(x)
        })
        .collect()
}

/// Stream for simulation `index`: `seed ⊕ index`.
fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index as u64)
}

impl<T: Real> PosteriorModel<T> {
    /// Universal-kriging draws `m_post(y) + m_post(P z₀ + στ ε) − z₀`, with
    /// `z₀` a prior draw (`a = 0`) and `ε` fresh observation noise.
    pub fn simulate_posterior(&self, n_sims: usize, seed: u64) -> Result<SimulationBatch<T>, GmrfError> {
        if n_sims == 0 {
            return Err(GmrfError::TooFewSimulations { needed: 1, got: 0 });
        }
        let mean = self.mean()?;
        let m = self.ops().size();
        let n = self.bound().len();
        let st = self.sigma() * self.tau();
        let samples = (0..n_sims)
            .into_par_iter()
            .map(|k| {
                let mut rng = stream(seed, k);
                let eps = normals(&mut rng, m);
                let z0 = self.simulate_prior(T::zero(), &eps)?;
                let mut data = self.bound().project(&z0);
                if self.scenario() == Scenario::Smoothing {
                    let noise: Vec<T> = normals(&mut rng, n);
                    data.iter_mut().zip(&noise).for_each(|(d, &e)| *d += st * e);
                }
                let resid = self.posterior_mean(&data)?;
                Ok(mean.iter().zip(&resid).zip(&z0).map(|((&a, &b), &c)| a + b - c).collect())
            })
            .collect::<Result<Vec<Vec<T>>, GmrfError>>()?;
        Ok(self.batch(samples, seed, SimulationKind::UniversalKriging))
    }

    /// Simple-kriging draws with the trend fixed at `a_τ`:
    /// `z̃₀ + m_sk(y − P z̃₀ − στ ε)`, `z̃₀ = z₀ + a_τ φ0`.
    pub fn simulate_simple_kriging(&self, n_sims: usize, seed: u64) -> Result<SimulationBatch<T>, GmrfError> {
        if n_sims == 0 {
            return Err(GmrfError::TooFewSimulations { needed: 1, got: 0 });
        }
        let a = self.trend_coefficient()?;
        let m = self.ops().size();
        let n = self.bound().len();
        let st = self.sigma() * self.tau();
        let phi0 = self.ops().phi0();
        let samples = (0..n_sims)
            .into_par_iter()
            .map(|k| {
                let mut rng = stream(seed, k);
                let eps = normals(&mut rng, m);
                let mut z = self.simulate_prior(T::zero(), &eps)?;
                z.iter_mut().zip(phi0).for_each(|(zi, &p)| *zi += a * p);
                let pz = self.bound().project(&z);
                let mut data: Vec<T> = self.observations().iter().zip(&pz).map(|(&y, &v)| y - v).collect();
                if self.scenario() == Scenario::Smoothing {
                    let noise: Vec<T> = normals(&mut rng, n);
                    data.iter_mut().zip(&noise).for_each(|(d, &e)| *d -= st * e);
                }
                let corr = self.simple_kriging_mean(&data)?;
                Ok(z.iter().zip(&corr).map(|(&a, &b)| a + b).collect())
            })
            .collect::<Result<Vec<Vec<T>>, GmrfError>>()?;
        Ok(self.batch(samples, seed, SimulationKind::SimpleKriging))
    }

    pub fn simulate(&self, kind: SimulationKind, n_sims: usize, seed: u64) -> Result<SimulationBatch<T>, GmrfError> {
        match kind {
            SimulationKind::UniversalKriging => self.simulate_posterior(n_sims, seed),
            SimulationKind::SimpleKriging => self.simulate_simple_kriging(n_sims, seed),
        }
    }

    fn batch(&self, samples: Vec<Vec<T>>, seed: u64, kind: SimulationKind) -> SimulationBatch<T> {
        SimulationBatch {
            samples,
            seed,
            alpha: self.alpha(),
            sigma: self.sigma(),
            tau: self.tau(),
            scenario: self.scenario(),
            kind,
        }
    }

    /// Unbiased per-node variance of a batch.
    pub fn posterior_variance(&self, batch: &SimulationBatch<T>) -> Result<Vec<T>, GmrfError> {
        batch.variance()
    }
}

impl<T: Real> SimulationBatch<T> {
    pub fn n_sims(&self) -> usize {
        self.samples.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    /// Per-node sample mean, computed as `x₀ + mean(x − x₀)` so that constant
    /// columns are reproduced exactly.
    pub fn mean(&self) -> Vec<T> {
        let n = T::from_count(self.n_sims().max(1));
        (0..self.num_nodes())
            .map(|j| {
                let x0 = self.samples[0][j];
                x0 + self.samples.iter().map(|s| s[j] - x0).sum::<T>() / n
            })
            .collect()
    }

    /// Unbiased per-node sample variance.
    pub fn variance(&self) -> Result<Vec<T>, GmrfError> {
        let k = self.n_sims();
        if k < 2 {
            return Err(GmrfError::TooFewSimulations { needed: 2, got: k });
        }
        let mean = self.mean();
        let denom = T::from_count(k - 1);
        Ok((0..self.num_nodes())
            .map(|j| self.samples.iter().map(|s| (s[j] - mean[j]) * (s[j] - mean[j])).sum::<T>() / denom)
            .collect())
    }

    /// Per-node quantile with linear interpolation between order statistics.
    pub fn quantile(&self, q: f64) -> Vec<T> {
        let k = self.n_sims();
        (0..self.num_nodes())
            .map(|j| {
                let mut col: Vec<T> = self.samples.iter().map(|s| s[j]).collect();
                col.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
                let pos = q.clamp(0.0, 1.0) * (k - 1) as f64;
                let lo = pos.floor() as usize;
                let hi = (lo + 1).min(k - 1);
                let frac = T::lit(pos - lo as f64);
                col[lo] + (col[hi] - col[lo]) * frac
            })
            .collect()
    }

    /// Empirical covariance between nodes `i` and `j`.
    pub fn covariance(&self, i: usize, j: usize) -> T {
        let mean = |c: usize| self.samples.iter().map(|s| s[c]).sum::<T>() / T::from_count(self.n_sims());
        let (mi, mj) = (mean(i), mean(j));
        let a: Vec<T> = self.samples.iter().map(|s| s[i] - mi).collect();
        let b: Vec<T> = self.samples.iter().map(|s| s[j] - mj).collect();
        dot(&a, &b) / T::from_count(self.n_sims() - 1)
    }
}
