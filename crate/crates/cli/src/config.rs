//! JSON run configuration.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use manifold_splines::data::ScoreConvention;
use manifold_splines::fem::AnisotropyParams;
use manifold_splines::gmrf::SimulationKind;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: MeshSource,
    #[serde(default)]
    pub observations: Option<ObservationSource>,
    #[serde(default)]
    pub model: ModelBlock,
    #[serde(default)]
    pub simulation: SimulationBlock,
    #[serde(default)]
    pub sphere: SphereBlock,
    #[serde(default)]
    pub score: ScoreBlock,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSource {
    /// Latitude–longitude sphere, steps in degrees.
    Sphere { lat_step: f64, lon_step: f64, #[serde(default = "one")] radius: f64 },
    /// Cylinder, `theta_step` in degrees.
    Cylinder {
        theta_step: f64,
        z_step: f64,
        #[serde(default = "one")]
        radius: f64,
        height: f64,
    },
    /// OFF file (no chart, so no anisotropy or designs).
    File(PathBuf),
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservationSource {
    /// `node,value` (observations at nodes) or `x,y,z,value` (points).
    Csv(PathBuf),
    /// Maximin design on the mesh chart with values from a field.
    Design { n: usize, #[serde(default)] seed: u64, field: FieldSource },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSource {
    /// Franke test function on the cylinder chart `(θ, z)`.
    Franke,
    /// Gridded `lat,lon,value` CSV read at the nearest cell of each sphere node;
    /// nodes on missing cells are excluded from designs and scoring.
    Gridded(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnisotropyChoice {
    #[default]
    None,
    Fit,
    Fixed(AnisotropyParams<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub estimate_tau: bool,
    #[serde(default)]
    pub anisotropy: AnisotropyChoice,
    /// Field scale; defaults to the maximum-likelihood value.
    #[serde(default)]
    pub sigma: Option<f64>,
    /// Working α; defaults to the centre of the admissible band.
    #[serde(default)]
    pub alpha: Option<f64>,
}

impl Default for ModelBlock {
    fn default() -> Self {
        Self { tau: 0.0, estimate_tau: false, anisotropy: AnisotropyChoice::None, sigma: None, alpha: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationBlock {
    #[serde(default = "default_n_sims")]
    pub n_sims: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_kind")]
    pub kind: SimulationKind,
}

fn default_n_sims() -> usize {
    500
}

fn default_kind() -> SimulationKind {
    SimulationKind::UniversalKriging
}

impl Default for SimulationBlock {
    fn default() -> Self {
        Self { n_sims: default_n_sims(), seed: 0, kind: default_kind() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereBlock {
    /// Truncation degree of the harmonic reference.
    #[serde(default = "default_degree")]
    pub degree: usize,
}

fn default_degree() -> usize {
    40
}

impl Default for SphereBlock {
    fn default() -> Self {
        Self { degree: default_degree() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreBlock {
    #[serde(default)]
    pub convention: ScoreConvention,
    /// `node_index,value` truth file; defaults to the observation field.
    #[serde(default)]
    pub truth: Option<PathBuf>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub n_sims: Option<usize>,
    pub kind: Option<SimulationKind>,
    pub score_convention: Option<ScoreConvention>,
    pub truth: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: Self =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    /// Relative input paths are taken relative to the config file.
    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let MeshSource::File(p) = &mut self.mesh {
            fix(p);
        }
        match &mut self.observations {
            Some(ObservationSource::Csv(p)) => fix(p),
            Some(ObservationSource::Design { field: FieldSource::Gridded(p), .. }) => fix(p),
            _ => {}
        }
        if let Some(p) = &mut self.score.truth {
            fix(p);
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.out {
            self.output = v.clone();
        }
        if let Some(v) = o.seed {
            self.simulation.seed = v;
        }
        if let Some(v) = o.alpha {
            self.model.alpha = Some(v);
        }
        if let Some(v) = o.n_sims {
            self.simulation.n_sims = v;
        }
        if let Some(v) = o.kind {
            self.simulation.kind = v;
        }
        if let Some(v) = o.score_convention {
            self.score.convention = v;
        }
        if let Some(v) = &o.truth {
            self.score.truth = Some(v.clone());
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let m = &self.model;
        if !(m.tau >= 0.0) || !m.tau.is_finite() {
            bail!("model.tau must be finite and non-negative");
        }
        if m.estimate_tau && m.tau == 0.0 {
            bail!("model.estimate_tau needs a positive starting tau");
        }
        if let Some(s) = m.sigma {
            if !(s > 0.0) {
                bail!("model.sigma must be positive");
            }
        }
        if let Some(a) = m.alpha {
            if !(a > 0.0) {
                bail!("model.alpha must be positive");
            }
        }
        if self.simulation.n_sims == 0 {
            bail!("simulation.n_sims must be at least 1");
        }
        if let Some(ObservationSource::Design { n, .. }) = &self.observations {
            if *n == 0 {
                bail!("observation design needs n ≥ 1");
            }
        }
        Ok(())
    }

    pub fn require_observations(&self) -> anyhow::Result<&ObservationSource> {
        self.observations.as_ref().context("config has no observations block")
    }
}
