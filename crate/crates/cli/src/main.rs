use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use manifold_splines::data::ScoreConvention;
use manifold_splines::gmrf::SimulationKind;
use manifold_splines_cli::{commands, init_threads, Overrides, RunConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "manifold-splines", version, about = "Spline prediction and simulation on triangulated surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Simulation seed (overrides `simulation.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Working α (overrides `model.alpha`).
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long = "n-sims", global = true)]
    n_sims: Option<usize>,
    #[arg(long, global = true, value_enum)]
    kind: Option<Kind>,
    #[arg(long = "score-convention", global = true, value_enum)]
    score_convention: Option<Convention>,
}

#[derive(Subcommand, Clone, Debug)]
enum Command {
    /// Generate the mesh and write it with its chart and truth field.
    MeshGen,
    /// Posterior mean at every node.
    Predict,
    /// Conditional simulations and per-node summaries.
    Simulate,
    /// Maximum-likelihood anisotropy fit.
    Fit,
    /// Predictive scores against a truth field.
    Score {
        /// `node_index,value` truth CSV.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Compare with harmonic kriging on the unit sphere.
    ValidateSphere,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Uk,
    Sk,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Convention {
    Paper,
    Gaussian,
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::MeshGen => "mesh-gen",
        Command::Predict => "predict",
        Command::Simulate => "simulate",
        Command::Fit => "fit",
        Command::Score { .. } => "score",
        Command::ValidateSphere => "validate-sphere",
    }
}

fn run(cli: &Cli) -> anyhow::Result<Vec<PathBuf>> {
    init_threads()?;
    let path = cli.config.as_ref().ok_or_else(|| anyhow::anyhow!("--config is required"))?;
    let mut cfg = RunConfig::load(path)?;
    let truth = match &cli.command {
        Command::Score { truth } => truth.clone(),
        _ => None,
    };
    cfg.apply(&Overrides {
        out: cli.out.clone(),
        seed: cli.seed,
        alpha: cli.alpha,
        n_sims: cli.n_sims,
        kind: cli.kind.map(|k| match k {
            Kind::Uk => SimulationKind::UniversalKriging,
            Kind::Sk => SimulationKind::SimpleKriging,
        }),
        score_convention: cli.score_convention.map(|c| match c {
            Convention::Paper => ScoreConvention::Paper,
            Convention::Gaussian => ScoreConvention::Gaussian,
        }),
        truth,
    });
    cfg.validate()?;
    match cli.command {
        Command::MeshGen => commands::cmd_mesh_gen(&cfg),
        Command::Predict => commands::cmd_predict(&cfg),
        Command::Simulate => commands::cmd_simulate(&cfg),
        Command::Fit => commands::cmd_fit(&cfg),
        Command::Score { .. } => commands::cmd_score(&cfg),
        Command::ValidateSphere => commands::cmd_validate_sphere(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let report = json!({
                "status": "error",
                "command": name(&cli.command),
                "message": e.to_string(),
                "causes": e.chain().skip(1).map(|c| c.to_string()).collect::<Vec<_>>(),
            });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}
