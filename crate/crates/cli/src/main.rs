use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use nctori_core::commands;
use nctori_core::config::{Format, RunConfig};
use nctori_core::verify::all_passed;

/// Heat-trace densities and curvature of functional metrics on noncommutative tori.
#[derive(Parser)]
#[command(name = "nctori", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report encoding, overriding the configuration.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Seed for randomized checks, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the curvature functions of the configured metric.
    Curvature,
    /// Evaluate the configured T-function queries by every applicable method.
    Tfunc,
    /// Run the verification suite; exits with status 1 if any check fails.
    Verify,
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(format) = cli.format {
        cfg.format = format;
    }
    let (text, ok) = match cli.command {
        Command::Curvature => (commands::curvature(&cfg)?.encode(cfg.format)?, true),
        Command::Tfunc => (commands::tfunc(&cfg)?.encode(cfg.format)?, true),
        Command::Verify => {
            let report = commands::verify(&cfg);
            let ok = all_passed(&report.rows);
            for r in report.rows.iter().filter(|r| !r.passed) {
                eprintln!("FAILED criterion {} {}: observed {:e}, tolerance {:e} ({})", r.id, r.name, r.observed, r.tolerance, r.detail);
            }
            (report.encode(cfg.format)?, ok)
        }
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ok)
}
