//! `kgwave`: field evaluation, method comparison, dispersion diagrams,
//! steepest-descent traces and FDTD convergence studies for the
//! Klein–Gordon waveguide impulse response.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical
//! non-convergence or tolerance violation, 1 I/O failure.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;
mod svg;

use config::{Common, Format};
use output::{Cell, Table};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(anyhow::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.into())
    }
}

/// Result of a command: the table written as CSV/JSON, the plot written as
/// SVG, and a violation message that turns into exit code 3.
pub struct Outcome {
    pub table: Table,
    pub panels: Vec<svg::Panel>,
    pub violation: Option<String>,
}

pub struct Run {
    pub common: Common,
    pub config: Vec<(String, Cell)>,
    pub outcome: Outcome,
}

#[derive(Debug, Parser)]
#[command(name = "kgwave", version, about = "Klein-Gordon waveguide impulse response toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the field on a space-time grid with one or more methods.
    Field(commands::field::FieldArgs),
    /// Compare methods against the closed form and check tolerances.
    Compare(commands::compare::CompareArgs),
    /// Sample the real dispersion diagram.
    Dispersion(commands::dispersion::DispersionArgs),
    /// Trace the steepest-descent contours through both saddles.
    Trace(commands::trace::TraceArgs),
    /// Run an FDTD convergence study against the closed form.
    Fdtd(commands::fdtd::FdtdArgs),
}

fn encode(run: &Run) -> Result<Vec<u8>, CliError> {
    Ok(match run.common.format {
        Format::Csv => run.outcome.table.to_csv().map_err(|e| CliError::Io(e.into()))?,
        Format::Json => run.outcome.table.to_json(&run.config).map_err(|e| CliError::Io(e.into()))?.into_bytes(),
        Format::Svg => svg::render(&run.outcome.panels).into_bytes(),
    })
}

fn execute(cli: Cli) -> Result<Option<String>, CliError> {
    let run = match cli.command {
        Command::Field(a) => commands::field::run(&a)?,
        Command::Compare(a) => commands::compare::run(&a)?,
        Command::Dispersion(a) => commands::dispersion::run(&a)?,
        Command::Trace(a) => commands::trace::run(&a)?,
        Command::Fdtd(a) => commands::fdtd::run(&a)?,
    };
    let bytes = encode(&run)?;
    match &run.common.out {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(run.outcome.violation)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(msg)) => {
            eprintln!("kgwave: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("kgwave: configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("kgwave: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Io(e)) => {
            eprintln!("kgwave: {e:#}");
            ExitCode::from(1)
        }
    }
}
