//! Dispatch a resolved configuration to its driver and write artifacts:
//! `summary.json` (deterministic), `rows.csv`, any extra files, and a
//! `timing.json` sidecar that keeps wall-clock noise out of the summary.

use std::fs;
use std::path::Path;
use std::time::Instant;

use crate::config::{CommandParams, RunConfig};
use crate::error::Result;
use crate::experiments::limits::{
    additive_limit_check, extremal_limit_check, gaussian_clt_check, joint_limit_check,
};
use crate::experiments::network::{percolation_sweep, sinr_chain_check, sir_tail_check};
use crate::experiments::report::{ExperimentOutput, Summary};
use crate::experiments::simulate::simulate_field_run;

/// Everything a run produced, before or after writing to disk.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub summary: Summary,
    pub output: ExperimentOutput,
    pub runtime_s: f64,
}

/// Run the configured experiment in memory.
pub fn execute(config: &RunConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    match &config.params {
        CommandParams::SimulateField(c) => simulate_field_run(c, config.seed),
        CommandParams::AdditiveLimit(c) => additive_limit_check(c, config.seed),
        CommandParams::JointLimit(c) => joint_limit_check(c, config.seed),
        CommandParams::ExtremalLimit(c) => extremal_limit_check(c, config.seed),
        CommandParams::GaussianClt(c) => gaussian_clt_check(c, config.seed),
        CommandParams::SirTail(c) => sir_tail_check(c, config.seed),
        CommandParams::SinrChain(c) => sinr_chain_check(c, config.seed),
        CommandParams::Percolation(c) => percolation_sweep(c, config.seed),
    }
}

/// Run and, when an output directory is configured, write `summary.json`,
/// `rows.csv`, extra artifacts, and `timing.json` into it.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let started = Instant::now();
    let output = execute(config)?;
    let runtime_s = started.elapsed().as_secs_f64();
    let summary = Summary::from_output(&output, config.seed, config.params.to_json()?);
    if let Some(dir) = &config.out_dir {
        write_artifacts(dir, &summary, &output, runtime_s)?;
    }
    Ok(RunReport {
        summary,
        output,
        runtime_s,
    })
}

fn write_artifacts(
    dir: &Path,
    summary: &Summary,
    output: &ExperimentOutput,
    runtime_s: f64,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("summary.json"), summary.to_json_pretty()?)?;
    fs::write(dir.join("rows.csv"), &output.rows_csv)?;
    for (name, contents) in &output.extra_files {
        fs::write(dir.join(name), contents)?;
    }
    let timing = serde_json::json!({ "runtime_s": runtime_s });
    let mut text = serde_json::to_string_pretty(&timing)?;
    text.push('\n');
    fs::write(dir.join("timing.json"), text)?;
    Ok(())
}
