//! Command-line front end: each subcommand runs one experiment, prints one
//! status line per check, and exits 0 on pass, 1 on failed checks, 2 on
//! configuration or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use snlab::config::{CommandName, RunConfig};
use snlab::runner::run;

#[derive(Parser)]
#[command(
    name = "snlab",
    version,
    about = "Monte Carlo laboratory for power-law shot-noise fields and their network consequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; its `command` field must match this subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the seed from the config file (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Write summary.json, rows.csv, and timing.json into this directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a shot-noise field repeatedly and dump every value.
    SimulateField(CommonArgs),
    /// Compare the rescaled additive field with its heavy-tailed limit law.
    AdditiveLimit(CommonArgs),
    /// Check joint transforms and asymptotic independence across probes.
    JointLimit(CommonArgs),
    /// Compare the rescaled extremal field with its Frechet limit.
    ExtremalLimit(CommonArgs),
    /// Check centered indicator counts against the Gaussian covariance.
    GaussianClt(CommonArgs),
    /// Estimate SIR tail probabilities under the matched threshold scaling.
    SirTail(CommonArgs),
    /// Sweep joint SINR feasibility along a relay chain.
    SinrChain(CommonArgs),
    /// Sweep SINR site percolation on a square lattice.
    Percolation(CommonArgs),
}

impl Command {
    fn parts(&self) -> (CommandName, &CommonArgs) {
        match self {
            Command::SimulateField(a) => (CommandName::SimulateField, a),
            Command::AdditiveLimit(a) => (CommandName::AdditiveLimit, a),
            Command::JointLimit(a) => (CommandName::JointLimit, a),
            Command::ExtremalLimit(a) => (CommandName::ExtremalLimit, a),
            Command::GaussianClt(a) => (CommandName::GaussianClt, a),
            Command::SirTail(a) => (CommandName::SirTail, a),
            Command::SinrChain(a) => (CommandName::SinrChain, a),
            Command::Percolation(a) => (CommandName::Percolation, a),
        }
    }
}

fn resolve_config(expected: CommandName, args: &CommonArgs) -> snlab::Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let config = RunConfig::load(path)?;
            if config.command() != expected {
                return Err(snlab::Error::Config(format!(
                    "config file is for `{}` but the `{}` subcommand was invoked",
                    config.command(),
                    expected
                )));
            }
            config
        }
        None => RunConfig::defaults(expected)?,
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out_dir) = &args.out_dir {
        config.out_dir = Some(out_dir.clone());
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (expected, args) = cli.command.parts();

    let config = match resolve_config(expected, args) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };

    let report = match run(&config) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };

    for check in &report.output.checks {
        println!("{}", check.status_line());
    }
    let passed = report.output.checks.iter().filter(|c| c.pass).count();
    println!(
        "{} {}: {passed}/{} checks passed in {:.2}s",
        if report.output.pass { "PASS" } else { "FAIL" },
        report.summary.experiment,
        report.output.checks.len(),
        report.runtime_s
    );
    if let Some(dir) = &config.out_dir {
        println!("results written to {}", dir.display());
    }

    if report.output.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
