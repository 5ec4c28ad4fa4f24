//! Batch experiment runner: builds a family from a declarative config,
//! computes, and writes results.json, table.csv, and manifest.json into the
//! output directory.
//!
//! Exit codes: 0 on a passing run, 1 for configuration or precondition
//! errors, 2 when the computation finishes but the numerical gate fails
//! (tables are still written so the failure can be inspected).

mod config;
mod run;

use clap::{Args, Parser, Subcommand};
use config::{FileConfig, Kind};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "argshift", version, about = "Argument-shift experiment runner")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Joint spectrum of the inhomogeneous Hamiltonians on a tensor module.
    Spectrum(RunArgs),
    /// Exact cyclic-span dimension from the highest vector.
    Cyclicity(RunArgs),
    /// Monodromy-defect scan over a grid of linear residues.
    Rigidity(RunArgs),
    /// Rescaling limit onto the product eigenbasis.
    Limit(RunArgs),
    /// Exact identity suite for one root datum.
    Verify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment description; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for anything random; defaults to the config value, then 7.
    #[arg(long)]
    seed: Option<u64>,
    /// Gate tolerance; defaults to the config value, then 1e-6.
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory; defaults to the config value, then runs/<kind>.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    // Usage errors are configuration errors and exit 1; clap's default code
    // would collide with the gate-failure code 2.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(
            e.kind(),
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
        ) =>
        {
            e.exit()
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let (kind, args) = match cli.cmd {
        Cmd::Spectrum(a) => (Kind::Spectrum, a),
        Cmd::Cyclicity(a) => (Kind::Cyclicity, a),
        Cmd::Rigidity(a) => (Kind::Rigidity, a),
        Cmd::Limit(a) => (Kind::Limit, a),
        Cmd::Verify(a) => (Kind::IdentitySuite, a),
    };

    let file = match &args.config {
        Some(path) => match config::load_file(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(1);
            }
        },
        None => FileConfig::default(),
    };
    let plan = match config::resolve(kind, file, args.seed, args.tol, args.out) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
    };

    let started = Instant::now();
    let output = match run::execute(&plan) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
    };
    let total_ms = started.elapsed().as_millis();

    if let Err(e) = run::write_artifacts(&plan, &output, args.config.as_deref(), total_ms) {
        eprintln!("output error: {e}");
        return ExitCode::from(1);
    }

    println!(
        "{}: {} ({} rows in {})",
        plan.kind.name(),
        if output.gate_pass { "PASS" } else { "GATE FAILED" },
        output.rows.len(),
        plan.out.display()
    );
    println!("  {}", output.gate_detail);
    if output.gate_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
