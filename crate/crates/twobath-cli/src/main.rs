//! `twobath` — steady-state covariance and entanglement of two coupled
//! oscillators damped by independent heat baths at different temperatures.
//!
//! All physics lives in the library crate; this binary adds a reproducible
//! front end: a declarative configuration file, four subcommands, CSV output
//! with fixed formatting, and stable exit statuses:
//!
//! * `0` — success,
//! * `2` — configuration or I/O error (bad file, bad key, bad flag),
//! * `3` — numerical failure in an otherwise valid run,
//! * `4` — at least one oracle cross-check failed.

mod commands;
mod config;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

/// Command-level failure, keyed to the process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Unusable configuration or I/O problem: exit status 2.
    Config(String),
    /// A computation failed on a valid configuration: exit status 3.
    Numerical(twobath::Error),
    /// One or more oracle checks failed: exit status 4.
    OracleCheck(String),
}

impl CliError {
    fn exit_status(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::OracleCheck(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numerical(err) => write!(f, "numerical failure: {err}"),
            CliError::OracleCheck(msg) => write!(f, "oracle check failed: {msg}"),
        }
    }
}

impl From<twobath::Error> for CliError {
    fn from(err: twobath::Error) -> Self {
        CliError::Numerical(err)
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::Config(format!("output write failed: {err}"))
    }
}

#[derive(Parser)]
#[command(
    name = "twobath",
    version,
    about = "Steady-state covariance and Gaussian entanglement of two \
             oscillators coupled to heat baths at different temperatures",
    arg_required_else_help = true
)]
struct Cli {
    /// Run configuration file (INI-style sections, see the README).
    #[arg(long, value_name = "PATH", global = true)]
    config: Option<PathBuf>,

    /// Write output here instead of the configured [output] path / stdout.
    #[arg(long, value_name = "PATH", global = true)]
    output: Option<PathBuf>,

    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, value_name = "N", global = true)]
    threads: Option<usize>,

    /// Override the [oracle] seed for the Monte Carlo cross-check.
    #[arg(long, value_name = "U64", global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One parameter point: covariance elements and entanglement diagnostics.
    Covariance,
    /// Sweep one bath's inverse temperature; tabulate both separability
    /// criteria, exact and closed-form approximate.
    CriterionSweep,
    /// Trace the entanglement boundary: solve one bath's critical inverse
    /// temperature across a sweep of the other bath's.
    CriticalLine,
    /// Run the independent numerical cross-checks and report per-check
    /// pass/fail.
    OracleCheck,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("twobath: {err}");
            ExitCode::from(err.exit_status())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot configure the thread pool: {e}")))?;
    }

    let path = cli.config.as_deref().ok_or_else(|| {
        CliError::Config("missing required flag --config <PATH>".to_string())
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read config file {}: {e}", path.display()))
    })?;
    let mut cfg = RunConfig::parse(&text)
        .map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
    if let Some(seed) = cli.seed {
        cfg.oracle.mc.seed = seed;
    }

    let out_path = cli.output.clone().or_else(|| cfg.output.path.clone());
    let mut sink: Box<dyn Write> = match &out_path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            CliError::Config(format!("cannot create output file {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout())),
    };

    let result = match cli.command {
        Command::Covariance => commands::cmd_covariance(&cfg, &mut sink),
        Command::CriterionSweep => commands::cmd_criterion_sweep(&cfg, &mut sink),
        Command::CriticalLine => commands::cmd_critical_line(&cfg, &mut sink),
        Command::OracleCheck => commands::cmd_oracle_check(&cfg, &mut sink),
    };
    // The oracle report (including its FAIL summary) must land even when the
    // command itself reports failure, so flush unconditionally.
    let flushed = sink.flush();
    result?;
    flushed.map_err(|e| CliError::Config(format!("output write failed: {e}")))?;
    Ok(())
}
