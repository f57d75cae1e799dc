//! Command-line experiment runner. Every subcommand except `verify` writes
//! a CSV: `#` summary lines, a header, then data rows with 15 significant
//! digits. Output depends only on the configuration, never on `--jobs`.

pub mod commands;
pub mod config;
pub mod csv;
pub mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use config::{ModelKind, SweepArgs, SweepConfig, Target};

use crate::error::Result;
use config::IntRange;

#[derive(Debug, Parser)]
#[command(
    name = "coboson",
    version,
    about = "Composite bosons from lattice fermions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground-state amplitudes at a single γU/J² (set with --gamma).
    GroundState(SweepArgs),
    /// Ground-space fidelity with each target along the γU/J² grid.
    FidelityScan(SweepArgs),
    /// Exact normalization ratios χ_N of block cobosons.
    Chi(ChiArgs),
    /// Single-pair entanglement 1 − P₁ along the γU/J² grid.
    PurityScan(SweepArgs),
    /// Pair-pair correlation g²(0, δ) along the γU/J² grid.
    G2Scan(SweepArgs),
    /// Partition-state energies M+1+…+1 along the γU/J² grid (uses --n, --J, --U).
    EnergyLedger(SweepArgs),
    /// Run the analytic checkpoint suite; exits nonzero on any failure.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ChiArgs {
    /// Ring sizes, inclusive a:b.
    #[arg(long = "d-range", default_value = "4:12")]
    pub d_range: String,
    /// Coboson numbers N, inclusive a:b.
    #[arg(long = "n-range", default_value = "1:4")]
    pub n_range: String,
    /// Block sizes M, inclusive a:b.
    #[arg(long = "m-range", default_value = "1:3")]
    pub m_range: String,
    /// Output CSV path [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command line. `Ok(FAILURE)` signals failed checkpoints.
pub fn run(cli: Cli) -> Result<ExitCode> {
    let (csv, out) = match cli.command {
        Command::GroundState(a) => {
            let cfg = a.resolve()?;
            (commands::ground_state(&cfg)?, cfg.out)
        }
        Command::FidelityScan(a) => {
            let cfg = a.resolve()?;
            (commands::fidelity_scan(&cfg)?, cfg.out)
        }
        Command::PurityScan(a) => {
            let cfg = a.resolve()?;
            (commands::purity_scan(&cfg)?, cfg.out)
        }
        Command::G2Scan(a) => {
            let cfg = a.resolve()?;
            (commands::g2_scan(&cfg)?, cfg.out)
        }
        Command::EnergyLedger(a) => {
            let cfg = a.resolve()?;
            (commands::energy_ledger_table(&cfg)?, cfg.out)
        }
        Command::Chi(a) => {
            let csv = commands::chi_table(
                a.d_range.parse::<IntRange>()?,
                a.n_range.parse()?,
                a.m_range.parse()?,
            )?;
            (csv, a.out)
        }
        Command::Verify(a) => return run_verify(&a),
    };
    csv.write(out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let checks = verify::run_checks()?;
    let mut report = String::new();
    for c in &checks {
        report.push_str(&c.to_string());
        report.push('\n');
    }
    let failed = checks
        .iter()
        .filter(|c| c.status == verify::Status::Fail)
        .count();
    report.push_str(&format!("{} checks, {failed} failed\n", checks.len()));
    print!("{report}");
    if let Some(path) = &args.out {
        std::fs::write(path, &report)?;
    }
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
