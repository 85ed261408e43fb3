//! CSV/JSON export of simulation batches.

use std::io::{self, Write};

use serde::Serialize;

use crate::scalar::Real;

use super::{GmrfError, SimulationBatch};

/// `node_index,mean,variance,sample_0,…` with per-node sample statistics.
pub fn write_simulations_csv<T: Real>(batch: &SimulationBatch<T>, mut out: impl Write) -> io::Result<()> {
    let mean = batch.mean();
    let var = batch.variance().map_err(io::Error::other)?;
    write!(out, "node_index,mean,variance")?;
    for k in 0..batch.n_sims() {
        write!(out, ",sample_{k}")?;
    }
    writeln!(out)?;
    for j in 0..batch.num_nodes() {
        write!(out, "{j},{:e},{:e}", mean[j].as_f64(), var[j].as_f64())?;
        for s in &batch.samples {
            write!(out, ",{:e}", s[j].as_f64())?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct Sidecar {
    seed: u64,
    alpha: f64,
    sigma: f64,
    tau: f64,
    scenario: u8,
    kind: super::SimulationKind,
    n_sims: usize,
    num_nodes: usize,
}

pub fn write_sidecar_json<T: Real>(batch: &SimulationBatch<T>, out: impl Write) -> io::Result<()> {
    let side = Sidecar {
        seed: batch.seed,
        alpha: batch.alpha.as_f64(),
        sigma: batch.sigma.as_f64(),
        tau: batch.tau.as_f64(),
        scenario: batch.scenario.number(),
        kind: batch.kind,
        n_sims: batch.n_sims(),
        num_nodes: batch.num_nodes(),
    };
    serde_json::to_writer_pretty(out, &side).map_err(io::Error::other)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow<T> {
    pub node: usize,
    pub mean: T,
    pub variance: T,
    pub q025: T,
    pub q975: T,
}

pub fn summary_rows<T: Real>(batch: &SimulationBatch<T>) -> Result<Vec<SummaryRow<T>>, GmrfError> {
    let mean = batch.mean();
    let var = batch.variance()?;
    let lo = batch.quantile(0.025);
    let hi = batch.quantile(0.975);
    Ok((0..batch.num_nodes())
        .map(|j| SummaryRow { node: j, mean: mean[j], variance: var[j], q025: lo[j], q975: hi[j] })
        .collect())
}

/// `node,mean,variance,q2.5,q97.5`
pub fn write_summary_csv<T: Real>(batch: &SimulationBatch<T>, mut out: impl Write) -> io::Result<()> {
    let rows = summary_rows(batch).map_err(io::Error::other)?;
    writeln!(out, "node,mean,variance,q2.5,q97.5")?;
    for r in rows {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e}",
            r.node,
            r.mean.as_f64(),
            r.variance.as_f64(),
            r.q025.as_f64(),
            r.q975.as_f64()
        )?;
    }
    Ok(())
}
