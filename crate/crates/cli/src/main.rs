//! `dual-racah verify` runs the verification suites for one configuration;
//! `dual-racah tables` exports the computed tables.
//!
//! Exit codes: 0 all suites pass, 1 a suite or table computation failed,
//! 2 configuration or I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dual_racah::suite::{emit_tables, run_suite, RunConfig, Status, TableKind};
use dual_racah::Error;

#[derive(Parser)]
#[command(name = "dual-racah", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured verification suites and write a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured working precision in bits.
        #[arg(long)]
        precision: Option<u32>,
        /// Output directory; the report goes to stdout when neither this nor
        /// the configured output directory is given.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one table family as CSV and JSON.
    Tables {
        #[arg(long)]
        config: PathBuf,
        /// polys, rnk, hamiltonian, spectrum or dual.
        #[arg(long)]
        what: String,
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(config: &Path, precision: Option<u32>) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::load(config)?;
    if let Some(p) = precision {
        cfg.precision = p;
    }
    Ok(cfg)
}

fn out_dir(cli: Option<PathBuf>, cfg: &RunConfig) -> Option<PathBuf> {
    cli.or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

fn verify(config: &Path, precision: Option<u32>, out: Option<PathBuf>) -> Result<bool, Error> {
    let cfg = load(config, precision)?;
    let report = run_suite(&cfg)?;
    for s in &report.suites {
        let label = match s.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ExpectedDegenerate => "DEGENERATE",
            Status::Skipped => "SKIP",
        };
        let name = s.name.to_string();
        match &s.note {
            Some(note) => eprintln!("{label:<10} {name:<10} {note}"),
            None => eprintln!("{label:<10} {name}"),
        }
    }
    let json = report.to_json();
    match out_dir(out, &cfg) {
        Some(dir) => {
            fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
            let name = cfg.output.report.clone().unwrap_or_else(|| "report.json".into());
            let path = dir.join(name);
            fs::write(&path, json).map_err(|e| io_err(&path, e))?;
            eprintln!("report written to {}", path.display());
        }
        None => print!("{json}"),
    }
    Ok(report.passed)
}

fn tables(config: &Path, what: &str, precision: Option<u32>, out: Option<PathBuf>) -> Result<bool, Error> {
    let kind: TableKind = what.parse()?;
    let cfg = load(config, precision)?;
    let dir = out_dir(out, &cfg).unwrap_or_else(|| PathBuf::from("."));
    for path in emit_tables(&cfg, kind, &dir)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify { config, precision, out } => verify(&config, precision, out),
        Command::Tables { config, what, precision, out } => tables(&config, &what, precision, out),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("failed: {e}");
            ExitCode::from(1)
        }
    }
}
