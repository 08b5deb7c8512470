//! `dfs`: sample spherical functions onto DFS grids, compute coefficient
//! tables, tabulate truncation errors and run the verification checks.

mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{ApproxArgs, CoeffsArgs, ErrorTableArgs, TransformArgs, VerifyArgs};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "dfs", version, about = "Double Fourier sphere transforms and convergence checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a function and write the doubled torus grid
    Transform(TransformArgs),
    /// Write the Fourier coefficient table of a function or grid file
    Coeffs(CoeffsArgs),
    /// Evaluate a truncated DFS expansion on a latitude-longitude grid
    Approx(ApproxArgs),
    /// Sup-norm truncation error for a list of degrees
    ErrorTable(ErrorTableArgs),
    /// Run one of the verification checks and write a JSON report
    Verify(VerifyArgs),
}

/// Caps the global rayon pool at `DFS_THREADS` when set.
fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("DFS_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("DFS_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Transform(a) => commands::transform(a),
        Command::Coeffs(a) => commands::coeffs(a),
        Command::Approx(a) => commands::approx(a),
        Command::ErrorTable(a) => commands::error_table_cmd(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dfs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
