//! `ramsey`: command-line front end for the Ramsey clock models.
//!
//! Exit status is 0 on success, 1 for invalid input or configuration and 2
//! for numerical failures.

mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{resolve, ConfigFile};
use error::CliError;

/// Environment variable that caps the worker thread count.
const THREADS_VAR: &str = "RAMSEY_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ramsey", version, about = "Ramsey interrogation of a dephasing two-level clock")]
struct Cli {
    /// TOML file with one section per subcommand; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Excitation probability from the closed form and the master equation.
    Ramsey(config::RamseyArgs),
    /// Lineshape over a drive-frequency grid.
    Scan(config::ScanArgs),
    /// Central-fringe width and contrast.
    Fwhm(config::FwhmArgs),
    /// Stationary Ramsey times across a multiplier sweep.
    Optimize(config::OptimizeArgs),
    /// Conditional probabilities of an entangled clock and remainder.
    Cpi(config::CpiArgs),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::validation(format!("{THREADS_VAR}: expected a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::validation(format!("{THREADS_VAR}: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let file = cli.config.as_deref().map(ConfigFile::load).transpose()?;
    let file = file.as_ref();
    match cli.command {
        Command::Ramsey(a) => {
            let (a, o) = resolve(a, file, |a| a.set_keys(), |a, b| a.overlay(b));
            commands::cmd_ramsey(a, &o)
        }
        Command::Scan(a) => {
            let (a, o) = resolve(a, file, |a| a.set_keys(), |a, b| a.overlay(b));
            commands::cmd_scan(a, &o)
        }
        Command::Fwhm(a) => {
            let (a, o) = resolve(a, file, |a| a.set_keys(), |a, b| a.overlay(b));
            commands::cmd_fwhm(a, &o)
        }
        Command::Optimize(a) => {
            let (a, o) = resolve(a, file, |a| a.set_keys(), |a, b| a.overlay(b));
            commands::cmd_optimize(a, &o)
        }
        Command::Cpi(a) => {
            let (a, o) = resolve(a, file, |a| a.set_keys(), |a, b| a.overlay(b));
            commands::cmd_cpi(a, &o)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
