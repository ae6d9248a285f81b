//! `hyper3b`: enumerate, verify, transform and export hyperspherical
//! three-body harmonics, and simulate the classical triangle.
//!
//! Exit codes: 0 on success, 1 when a check fails or a run stops early,
//! 2 on invalid arguments.

mod basis_cmd;
mod config;
mod enumerate;
mod export;
mod output;
mod simulate;
mod transform_cmd;
mod verify;

use anyhow::Result;
use clap::{Parser, Subcommand};
use config::Config;
use output::UsageError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "hyper3b",
    version,
    about = "Hyperspherical harmonics and classical dynamics of three equal masses"
)]
struct Cli {
    /// Optional JSON configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, env = "HYPER3B_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List symmetrized labels (K, J, M, nu, omega index) with degeneracies.
    Enumerate(enumerate::Args),
    /// Run an invariant suite and report the worst residuals.
    Verify(verify::Args),
    /// Rotation coefficients and Omega block diagonalization.
    #[command(subcommand)]
    Transform(transform_cmd::Command),
    /// Integrate the classical equations of motion.
    Simulate(simulate::Args),
    /// Convert a trajectory or plot one of its columns as SVG.
    Export(export::Args),
    /// Write tree or symmetrized basis polynomials and a JSON manifest.
    Basis(basis_cmd::Args),
}

fn run(cli: Cli) -> Result<u8> {
    let cfg = Config::load(cli.config.as_deref())?;
    if let Some(n) = cli.jobs.or(cfg.jobs) {
        if n == 0 {
            return output::usage("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    match cli.command {
        Command::Enumerate(a) => enumerate::run(&a, &cfg),
        Command::Verify(a) => verify::run(&a, &cfg),
        Command::Transform(c) => transform_cmd::run(&c, &cfg),
        Command::Simulate(a) => simulate::run(&a, &cfg),
        Command::Export(a) => export::run(&a),
        Command::Basis(a) => basis_cmd::run(&a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
