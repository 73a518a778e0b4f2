//! `ibc1d`: ground states, figure data, verification suites and graph
//! spectra for one-dimensional interior-boundary-condition models.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;
use crate::output::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "ibc1d", version, about = "Interior-boundary-condition models in one dimension (units ħ = 2m = 1)")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bound state of a line, massive, multi-source, box or graph model.
    Ground(commands::ground::GroundArgs),
    /// Data behind the two-source energy curve, the box ground state against
    /// source position, and the spectral staircase.
    Figure(commands::figure::FigureArgs),
    /// Run a verification suite and print a report with residuals.
    Verify(commands::verify::VerifyArgs),
    /// Spectrum of a metric graph read from a config file.
    Graph(commands::graph::GraphArgs),
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Ground(args) => commands::ground::run(args),
        Command::Figure(args) => commands::figure::run(args),
        Command::Verify(args) => commands::verify::run(args),
        Command::Graph(args) => commands::graph::run(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let text = report.render(cli.format);
    if let Err(e) = output::write_atomically(cli.output.as_deref(), &text) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
