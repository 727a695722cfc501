use std::process::ExitCode;

use clap::Parser;
use sturm_cli::{run, Command};

/// Forward and inverse spectral problems for Sturm-Liouville operators with
/// singular potentials and polynomial boundary conditions.
///
/// Exit codes: 0 ok, 1 a check failed, 2 invalid input, 3 forward solver
/// failure, 4 perturbation too large for the main equation, 5 polynomial
/// extraction failed.
#[derive(Debug, Parser)]
#[command(name = "sturm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command, &mut std::io::stderr()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
