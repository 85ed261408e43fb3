//! Subcommand pipelines.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use log::{info, warn};
use manifold_splines::data::{franke_cylinder, load_gridded_csv, predictive_score, FRANKE_HEIGHT};
use manifold_splines::fem::{assemble, AnisotropyParams};
use manifold_splines::gmrf::{
    write_sidecar_json, write_simulations_csv, write_summary_csv, ModelOptions, PosteriorModel, SimulationBatch,
};
use manifold_splines::likelihood::{evaluate, fit_bound, AnisotropyMode, FitOptions, FitResult};
use manifold_splines::mesh::{
    bind_observations, generate_cylinder_mesh, generate_sphere_mesh, load_mesh, maximin_node_design, write_off,
    BoundObservations, DesignOptions, Locations, ObservationSet, TriangleMesh,
};
use manifold_splines::sphere_ref::{SphereKernel, SphereKriging, MAX_DEGREE};
use serde::Serialize;

use crate::config::{AnisotropyChoice, FieldSource, MeshSource, ObservationSource, RunConfig};
use crate::io::{read_node_values, verify_csv, write_atomic, write_json, Table};

pub fn build_mesh(source: &MeshSource) -> anyhow::Result<TriangleMesh<f64>> {
    Ok(match source {
        MeshSource::Sphere { lat_step, lon_step, radius } => generate_sphere_mesh(*lat_step, *lon_step, *radius)?,
        MeshSource::Cylinder { theta_step, z_step, radius, height } => {
            generate_cylinder_mesh(*theta_step, *z_step, *radius, *height)?
        }
        MeshSource::File(p) => load_mesh(p)?,
    })
}

/// Field value at every node; `None` where the field is undefined.
pub fn field_values(mesh: &TriangleMesh<f64>, source: &MeshSource, field: &FieldSource) -> anyhow::Result<Vec<Option<f64>>> {
    let chart = mesh.chart().context("synthetic fields need a generated mesh with a chart")?;
    match field {
        FieldSource::Franke => {
            let MeshSource::Cylinder { height, .. } = source else {
                bail!("the franke field is defined on the cylinder only");
            };
            if *height > FRANKE_HEIGHT {
                bail!("the franke field needs a cylinder height of at most {FRANKE_HEIGHT}");
            }
            chart.coords.iter().map(|c| Ok(Some(franke_cylinder(c[0], c[1])?))).collect()
        }
        FieldSource::Gridded(path) => {
            if !matches!(source, MeshSource::Sphere { .. }) {
                bail!("gridded fields are read on the sphere only");
            }
            let grid = load_gridded_csv(path).with_context(|| format!("loading {}", path.display()))?;
            Ok(chart
                .coords
                .iter()
                .map(|c| grid.nearest(90.0 - c[0].to_degrees(), c[1].to_degrees()))
                .collect())
        }
    }
}

/// Loaded observations plus the design field, when there is one.
pub struct Inputs {
    pub mesh: TriangleMesh<f64>,
    pub obs: ObservationSet<f64>,
    pub bound: BoundObservations<f64>,
    pub field: Option<Vec<Option<f64>>>,
}

pub fn load_inputs(cfg: &RunConfig) -> anyhow::Result<Inputs> {
    let mesh = build_mesh(&cfg.mesh)?;
    let tau = cfg.model.tau;
    let (obs, field) = match cfg.require_observations()? {
        ObservationSource::Csv(path) => (read_observations(path, tau)?, None),
        ObservationSource::Design { n, seed, field } => {
            let values = field_values(&mesh, &cfg.mesh, field)?;
            let mut opts = DesignOptions::default();
            if values.iter().any(Option::is_none) {
                opts.candidates = Some(values.iter().map(Option::is_some).collect());
            }
            let nodes = maximin_node_design(&mesh, *n, *seed, &opts)?;
            let y: Vec<f64> = nodes.iter().map(|&j| values[j].expect("design restricted to defined nodes")).collect();
            let obs = if tau == 0.0 {
                ObservationSet::at_nodes(nodes, y, 0.0)?
            } else {
                ObservationSet::at_points(nodes.iter().map(|&j| mesh.vertices()[j]).collect(), y, tau)?
            };
            (obs, Some(values))
        }
    };
    let bound = bind_observations(&mesh, &obs)?;
    Ok(Inputs { mesh, obs, bound, field })
}

fn read_observations(path: &Path, tau: f64) -> anyhow::Result<ObservationSet<f64>> {
    let t = Table::read(path)?;
    let value = t.column("value")?;
    let y = (0..t.rows.len()).map(|r| t.f64_at(r, value)).collect::<anyhow::Result<Vec<_>>>()?;
    if let Ok(node) = t.column("node") {
        let nodes = (0..t.rows.len()).map(|r| t.usize_at(r, node)).collect::<anyhow::Result<Vec<_>>>()?;
        if tau == 0.0 {
            return Ok(ObservationSet::at_nodes(nodes, y, 0.0)?);
        }
        bail!("node-indexed observations need tau = 0; use x,y,z columns for noisy observations");
    }
    let cols = [t.column("x")?, t.column("y")?, t.column("z")?];
    let pts = (0..t.rows.len())
        .map(|r| Ok([t.f64_at(r, cols[0])?, t.f64_at(r, cols[1])?, t.f64_at(r, cols[2])?]))
        .collect::<anyhow::Result<Vec<_>>>()?;
    if tau == 0.0 {
        bail!("point observations need tau > 0; use node,value columns for exact interpolation");
    }
    Ok(ObservationSet::at_points(pts, y, tau)?)
}

/// Parameters the posterior model is built with.
pub struct Resolved {
    pub beta: Option<AnisotropyParams<f64>>,
    pub sigma: f64,
    pub tau: f64,
    pub loglik: Option<f64>,
    pub fit: Option<FitResult>,
}

fn fit_options(cfg: &RunConfig, mode: AnisotropyMode) -> FitOptions {
    FitOptions { anisotropy: mode, estimate_tau: cfg.model.estimate_tau, ..FitOptions::default() }
}

pub fn resolve_parameters(cfg: &RunConfig, inputs: &Inputs) -> anyhow::Result<Resolved> {
    let (mode, fixed) = match cfg.model.anisotropy {
        AnisotropyChoice::None => (AnisotropyMode::None, None),
        AnisotropyChoice::Fixed(b) => (AnisotropyMode::Fixed(b), Some(b)),
        AnisotropyChoice::Fit => (AnisotropyMode::Fit, None),
    };
    let needs_fit = mode == AnisotropyMode::Fit || cfg.model.estimate_tau;
    let mut r = if needs_fit {
        let f = fit_bound(&inputs.mesh, &inputs.bound, &inputs.obs.values, &fit_options(cfg, mode))?;
        let beta = match mode {
            AnisotropyMode::None => None,
            _ => Some(f.beta_hat),
        };
        Resolved { beta, sigma: f.sigma_hat, tau: f.tau_hat, loglik: Some(f.loglik), fit: Some(f) }
    } else if cfg.model.sigma.is_none() {
        let v = evaluate(
            &inputs.mesh,
            &inputs.bound,
            &inputs.obs.values,
            fixed.as_ref(),
            cfg.model.tau,
            Default::default(),
        )?;
        Resolved { beta: fixed, sigma: v.sigma_star, tau: cfg.model.tau, loglik: Some(v.value), fit: None }
    } else {
        Resolved { beta: fixed, sigma: 0.0, tau: cfg.model.tau, loglik: None, fit: None }
    };
    if let Some(s) = cfg.model.sigma {
        r.sigma = s;
    }
    Ok(r)
}

pub fn build_model(cfg: &RunConfig, inputs: &Inputs, r: &Resolved) -> anyhow::Result<PosteriorModel<f64>> {
    let ops = assemble(&inputs.mesh, r.beta.as_ref())?;
    let mut bound = inputs.bound.clone();
    if r.tau != inputs.bound.tau() {
        let obs = ObservationSet { tau: r.tau, ..inputs.obs.clone() };
        bound = bind_observations(&inputs.mesh, &obs)?;
    }
    let opts = ModelOptions { alpha: cfg.model.alpha, ..ModelOptions::default() };
    let model = PosteriorModel::new(ops, bound, inputs.obs.values.clone(), r.sigma, &opts)?;
    let b = model.spectral_bounds();
    info!(
        "alpha = {:e} ({}), spectral bounds [{:e}, {:e}]",
        model.alpha(),
        if cfg.model.alpha.is_some() { "given" } else { "automatic" },
        b.lambda_min_pos,
        b.lambda_max
    );
    Ok(model)
}

#[derive(Debug, Serialize)]
struct ModelReport {
    scenario: u8,
    num_nodes: usize,
    num_observations: usize,
    observed_nodes: Option<Vec<usize>>,
    sigma: f64,
    tau: f64,
    anisotropy: AnisotropyParams<f64>,
    alpha: f64,
    alpha_given: bool,
    lambda_min_pos: f64,
    lambda_max: f64,
    alpha_warning: Option<String>,
    trend_coefficient: f64,
    loglik: Option<f64>,
}

fn write_model_json(cfg: &RunConfig, model: &PosteriorModel<f64>, r: &Resolved) -> anyhow::Result<()> {
    let b = model.spectral_bounds();
    let report = ModelReport {
        scenario: model.scenario().number(),
        num_nodes: model.ops().size(),
        num_observations: model.bound().len(),
        observed_nodes: model.bound().nodes().map(<[usize]>::to_vec),
        sigma: model.sigma(),
        tau: model.tau(),
        anisotropy: r.beta.unwrap_or_else(AnisotropyParams::isotropic),
        alpha: model.alpha(),
        alpha_given: cfg.model.alpha.is_some(),
        lambda_min_pos: b.lambda_min_pos,
        lambda_max: b.lambda_max,
        alpha_warning: model.alpha_warning().map(str::to_string),
        trend_coefficient: model.trend_coefficient()?,
        loglik: r.loglik,
    };
    write_json(&cfg.output.join("model.json"), &report)
}

fn write_observations_csv(cfg: &RunConfig, inputs: &Inputs) -> anyhow::Result<()> {
    let path = cfg.output.join("observations.csv");
    let obs = &inputs.obs;
    match &obs.locations {
        Locations::Nodes(nodes) => {
            let v = inputs.mesh.vertices();
            write_atomic(&path, |w| {
                writeln!(w, "node,x,y,z,value")?;
                for (&j, y) in nodes.iter().zip(&obs.values) {
                    writeln!(w, "{j},{:e},{:e},{:e},{y:e}", v[j][0], v[j][1], v[j][2])?;
                }
                Ok(())
            })?;
        }
        Locations::Points(pts) => write_atomic(&path, |w| {
            writeln!(w, "x,y,z,value")?;
            for (p, y) in pts.iter().zip(&obs.values) {
                writeln!(w, "{:e},{:e},{:e},{y:e}", p[0], p[1], p[2])?;
            }
            Ok(())
        })?,
    }
    verify_csv(&path, &[], obs.len())
}

fn write_chart_csv(dir: &Path, mesh: &TriangleMesh<f64>) -> anyhow::Result<()> {
    let Some(chart) = mesh.chart() else { return Ok(()) };
    let path = dir.join("chart.csv");
    write_atomic(&path, |w| {
        writeln!(w, "node_index,chart_1,chart_2")?;
        for (j, c) in chart.coords.iter().enumerate() {
            writeln!(w, "{j},{:e},{:e}", c[0], c[1])?;
        }
        Ok(())
    })?;
    verify_csv(&path, &["node_index", "chart_1", "chart_2"], mesh.num_vertices())
}

fn write_truth_csv(dir: &Path, values: &[Option<f64>]) -> anyhow::Result<()> {
    let path = dir.join("truth.csv");
    write_atomic(&path, |w| {
        writeln!(w, "node_index,value")?;
        for (j, v) in values.iter().enumerate() {
            if let Some(v) = v {
                writeln!(w, "{j},{v:e}")?;
            }
        }
        Ok(())
    })?;
    verify_csv(&path, &["node_index", "value"], values.iter().flatten().count())
}

#[derive(Debug, Serialize)]
struct MeshReport {
    num_vertices: usize,
    num_triangles: usize,
    total_area: f64,
    closed: bool,
    boundary_loops: usize,
    has_chart: bool,
}

/// Writes `mesh.off`, `mesh.json`, `chart.csv` and, with a design field, `truth.csv`.
pub fn cmd_mesh_gen(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    let mesh = build_mesh(&cfg.mesh)?;
    let dir = &cfg.output;
    write_atomic(&dir.join("mesh.off"), |w| write_off(&mesh, w))?;
    let reread = load_mesh::<f64>(dir.join("mesh.off"))?;
    if reread.num_vertices() != mesh.num_vertices() || reread.num_triangles() != mesh.num_triangles() {
        bail!("mesh.off did not round-trip");
    }
    let report = MeshReport {
        num_vertices: mesh.num_vertices(),
        num_triangles: mesh.num_triangles(),
        total_area: mesh.total_area(),
        closed: mesh.is_closed(),
        boundary_loops: mesh.boundary_loops(),
        has_chart: mesh.chart().is_some(),
    };
    write_json(&dir.join("mesh.json"), &report)?;
    let mut files = vec![dir.join("mesh.off"), dir.join("mesh.json")];
    if mesh.chart().is_some() {
        write_chart_csv(dir, &mesh)?;
        files.push(dir.join("chart.csv"));
    }
    if let Some(ObservationSource::Design { field, .. }) = &cfg.observations {
        write_truth_csv(dir, &field_values(&mesh, &cfg.mesh, field)?)?;
        files.push(dir.join("truth.csv"));
    }
    info!("mesh: {} vertices, {} triangles", mesh.num_vertices(), mesh.num_triangles());
    Ok(files)
}

/// Writes `prediction.csv` (`node_index,x,y,z,mean`), `model.json` and `observations.csv`.
pub fn cmd_predict(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    let inputs = load_inputs(cfg)?;
    let r = resolve_parameters(cfg, &inputs)?;
    let model = build_model(cfg, &inputs, &r)?;
    let mean = model.mean()?;
    let dir = &cfg.output;
    let path = dir.join("prediction.csv");
    let v = inputs.mesh.vertices();
    write_atomic(&path, |w| {
        writeln!(w, "node_index,x,y,z,mean")?;
        for (j, m) in mean.iter().enumerate() {
            writeln!(w, "{j},{:e},{:e},{:e},{m:e}", v[j][0], v[j][1], v[j][2])?;
        }
        Ok(())
    })?;
    verify_csv(&path, &["node_index", "x", "y", "z", "mean"], mean.len())?;
    write_model_json(cfg, &model, &r)?;
    write_observations_csv(cfg, &inputs)?;
    write_chart_csv(dir, &inputs.mesh)?;
    Ok(vec![path, dir.join("model.json"), dir.join("observations.csv")])
}

fn run_simulations(cfg: &RunConfig, model: &PosteriorModel<f64>) -> anyhow::Result<SimulationBatch<f64>> {
    let s = &cfg.simulation;
    info!("simulating {} {:?} draws with seed {}", s.n_sims, s.kind, s.seed);
    Ok(model.simulate(s.kind, s.n_sims, s.seed)?)
}

/// Writes `simulations.csv`, `simulations.json`, `summary.csv` and `model.json`.
pub fn cmd_simulate(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    if cfg.simulation.n_sims < 2 {
        bail!("simulation.n_sims must be at least 2 to report variances");
    }
    let inputs = load_inputs(cfg)?;
    let r = resolve_parameters(cfg, &inputs)?;
    let model = build_model(cfg, &inputs, &r)?;
    let batch = run_simulations(cfg, &model)?;
    let dir = &cfg.output;
    let m = batch.num_nodes();
    let sims = dir.join("simulations.csv");
    write_atomic(&sims, |w| write_simulations_csv(&batch, w))?;
    verify_csv(&sims, &["node_index", "mean", "variance"], m)?;
    write_atomic(&dir.join("simulations.json"), |w| write_sidecar_json(&batch, w))?;
    let summary = dir.join("summary.csv");
    write_atomic(&summary, |w| write_summary_csv(&batch, w))?;
    verify_csv(&summary, &["node", "mean", "variance", "q2.5", "q97.5"], m)?;
    write_model_json(cfg, &model, &r)?;
    write_observations_csv(cfg, &inputs)?;
    write_chart_csv(dir, &inputs.mesh)?;
    Ok(vec![sims, dir.join("simulations.json"), summary, dir.join("model.json")])
}

/// Writes `fit.json` (the fit result with its trace) and `trace.csv`.
pub fn cmd_fit(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    let mode = match cfg.model.anisotropy {
        AnisotropyChoice::None => {
            bail!("fit needs model.anisotropy set to \"fit\" or {{\"fixed\": ...}}; it is \"none\"")
        }
        AnisotropyChoice::Fixed(b) => AnisotropyMode::Fixed(b),
        AnisotropyChoice::Fit => AnisotropyMode::Fit,
    };
    let inputs = load_inputs(cfg)?;
    let f = fit_bound(&inputs.mesh, &inputs.bound, &inputs.obs.values, &fit_options(cfg, mode))?;
    info!(
        "fit: angle {:.4}, log-ratio {:.4}, sigma {:e}, a {:e}, tau {:e}, loglik {:.6}",
        f.beta_hat.angle, f.beta_hat.log_ratio, f.sigma_hat, f.a_hat, f.tau_hat, f.loglik
    );
    let dir = &cfg.output;
    write_json(&dir.join("fit.json"), &f)?;
    let trace = dir.join("trace.csv");
    write_atomic(&trace, |w| {
        writeln!(w, "start,angle,log_ratio,tau,loglik,best_so_far")?;
        for t in &f.trace {
            writeln!(w, "{},{:e},{:e},{:e},{:e},{:e}", t.start, t.angle, t.log_ratio, t.tau, t.loglik, t.best_so_far)?;
        }
        Ok(())
    })?;
    verify_csv(&trace, &["start", "angle"], f.trace.len())?;
    Ok(vec![dir.join("fit.json"), trace])
}

#[derive(Debug, Serialize)]
struct ScoreSummary {
    convention: manifold_splines::data::ScoreConvention,
    n_scored: usize,
    rmse: f64,
    mean_score: f64,
    n_sims: usize,
    seed: u64,
    excluded_observed: usize,
    excluded_missing_truth: Vec<usize>,
    excluded_nonpositive_variance: Vec<usize>,
}

/// Per-node predictive scores on every node with a truth value that is not an
/// observation node. Writes `scores.csv` and `score_summary.json`.
pub fn cmd_score(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    if cfg.simulation.n_sims < 2 {
        bail!("simulation.n_sims must be at least 2 to estimate predictive variances");
    }
    let inputs = load_inputs(cfg)?;
    let m = inputs.mesh.num_vertices();
    let truth: BTreeMap<usize, f64> = match (&cfg.score.truth, &inputs.field) {
        (Some(path), _) => read_node_values(path)?,
        (None, Some(values)) => values.iter().enumerate().filter_map(|(j, v)| v.map(|v| (j, v))).collect(),
        (None, None) => bail!("no truth available: set score.truth or pass --truth"),
    };
    if let Some((&j, _)) = truth.range(m..).next() {
        bail!("truth refers to node {j}, the mesh has {m} nodes");
    }
    let r = resolve_parameters(cfg, &inputs)?;
    let model = build_model(cfg, &inputs, &r)?;
    let mean = model.mean()?;
    let batch = run_simulations(cfg, &model)?;
    let var = batch.variance()?;
    let observed: Vec<usize> = model.bound().nodes().map(<[usize]>::to_vec).unwrap_or_default();
    let interpolating = model.scenario() == manifold_splines::mesh::Scenario::Interpolation;
    let mut missing = Vec::new();
    let mut nonpositive = Vec::new();
    let mut rows = Vec::new();
    let mut excluded_observed = 0;
    for j in 0..m {
        if interpolating && observed.contains(&j) {
            excluded_observed += 1;
            continue;
        }
        let Some(&t) = truth.get(&j) else {
            missing.push(j);
            continue;
        };
        if !(var[j] > 0.0) {
            nonpositive.push(j);
            continue;
        }
        let s = predictive_score(mean[j], var[j], t, cfg.score.convention)?;
        rows.push((j, s, mean[j], var[j], t));
    }
    if !missing.is_empty() {
        warn!("{} nodes have no truth value and are excluded: {:?}", missing.len(), missing);
    }
    if !nonpositive.is_empty() {
        warn!("{} nodes have non-positive predictive variance and are excluded", nonpositive.len());
    }
    if rows.is_empty() {
        bail!("no node could be scored");
    }
    let dir = &cfg.output;
    let path = dir.join("scores.csv");
    write_atomic(&path, |w| {
        writeln!(w, "node_index,score,prediction,variance,truth")?;
        for (j, s, p, v, t) in &rows {
            writeln!(w, "{j},{s:e},{p:e},{v:e},{t:e}")?;
        }
        Ok(())
    })?;
    verify_csv(&path, &["node_index", "score"], rows.len())?;
    let n = rows.len() as f64;
    let summary = ScoreSummary {
        convention: cfg.score.convention,
        n_scored: rows.len(),
        rmse: (rows.iter().map(|r| (r.2 - r.4).powi(2)).sum::<f64>() / n).sqrt(),
        mean_score: rows.iter().map(|r| r.1).sum::<f64>() / n,
        n_sims: cfg.simulation.n_sims,
        seed: cfg.simulation.seed,
        excluded_observed,
        excluded_missing_truth: missing,
        excluded_nonpositive_variance: nonpositive,
    };
    info!("RMSE {:.6}, mean score {:.6} over {} nodes", summary.rmse, summary.mean_score, summary.n_scored);
    write_json(&dir.join("score_summary.json"), &summary)?;
    Ok(vec![path, dir.join("score_summary.json")])
}

#[derive(Debug, Serialize)]
struct SphereSummary {
    degree: usize,
    degree_doubled: usize,
    num_nodes: usize,
    num_observations: usize,
    /// Mass-weighted `‖m_FE − m_H‖ / ‖m_H‖`.
    relative_l2: f64,
    max_abs_diff: f64,
    /// Largest change of the harmonic mean when the degree is doubled.
    max_truncation_delta: f64,
}

/// Compares the finite-element mean with harmonic kriging on the unit sphere.
/// Writes `comparison.csv` and `sphere_validation.json`.
pub fn cmd_validate_sphere(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    match cfg.mesh {
        MeshSource::Sphere { radius, .. } if (radius - 1.0).abs() < 1e-12 => {}
        _ => bail!("validate-sphere needs a generated sphere mesh with radius 1"),
    }
    if cfg.model.anisotropy != AnisotropyChoice::None {
        bail!("the harmonic reference is isotropic; set model.anisotropy to \"none\"");
    }
    let degree = cfg.sphere.degree;
    let doubled = (2 * degree).min(MAX_DEGREE);
    let inputs = load_inputs(cfg)?;
    let r = Resolved { beta: None, sigma: cfg.model.sigma.unwrap_or(1.0), tau: cfg.model.tau, loglik: None, fit: None };
    let model = build_model(cfg, &inputs, &r)?;
    let fe = model.mean()?;
    let unit = |p: [f64; 3]| {
        let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        p.map(|x| x / n)
    };
    let points: Vec<[f64; 3]> = match &inputs.obs.locations {
        Locations::Nodes(nodes) => nodes.iter().map(|&j| unit(inputs.mesh.vertices()[j])).collect(),
        Locations::Points(pts) => pts.iter().map(|&p| unit(p)).collect(),
    };
    let y = &inputs.obs.values;
    let k1 = SphereKriging::new(SphereKernel::new(degree)?, points.clone(), y, r.tau)?;
    let k2 = SphereKriging::new(SphereKernel::new(doubled)?, points, y, r.tau)?;
    let mass = model.ops().mass();
    let mut rows = Vec::with_capacity(fe.len());
    let (mut num, mut den, mut max_diff, mut max_delta) = (0.0, 0.0, 0.0f64, 0.0f64);
    for (j, v) in inputs.mesh.vertices().iter().enumerate() {
        let s = unit(*v);
        let (h, h2) = (k1.mean(s)?, k2.mean(s)?);
        let d = (fe[j] - h).abs();
        num += mass[j] * d * d;
        den += mass[j] * h * h;
        max_diff = max_diff.max(d);
        max_delta = max_delta.max((h2 - h).abs());
        rows.push((j, fe[j], h, d, h2));
    }
    let dir = &cfg.output;
    let path = dir.join("comparison.csv");
    write_atomic(&path, |w| {
        writeln!(w, "node,fe_mean,harmonic_mean,abs_diff,harmonic_mean_k2")?;
        for (j, f, h, d, h2) in &rows {
            writeln!(w, "{j},{f:e},{h:e},{d:e},{h2:e}")?;
        }
        Ok(())
    })?;
    verify_csv(&path, &["node", "fe_mean", "harmonic_mean", "abs_diff", "harmonic_mean_k2"], rows.len())?;
    let summary = SphereSummary {
        degree,
        degree_doubled: doubled,
        num_nodes: fe.len(),
        num_observations: y.len(),
        relative_l2: (num / den).sqrt(),
        max_abs_diff: max_diff,
        max_truncation_delta: max_delta,
    };
    info!("relative L2 difference {:.4e} (degree {degree})", summary.relative_l2);
    write_json(&dir.join("sphere_validation.json"), &summary)?;
    Ok(vec![path, dir.join("sphere_validation.json")])
}
