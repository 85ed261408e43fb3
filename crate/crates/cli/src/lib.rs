//! Command-line pipelines for spline prediction on triangulated surfaces.

pub mod commands;
pub mod config;
pub mod io;

pub use commands::{cmd_fit, cmd_mesh_gen, cmd_predict, cmd_score, cmd_simulate, cmd_validate_sphere};
pub use config::{Overrides, RunConfig};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MANIFOLD_SPLINES_THREADS";

/// Sizes the global thread pool from [`THREADS_ENV`] when set.
pub fn init_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| anyhow::anyhow!("{THREADS_ENV}={raw:?} is not a positive integer"))?;
    if n == 0 {
        anyhow::bail!("{THREADS_ENV} must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}
