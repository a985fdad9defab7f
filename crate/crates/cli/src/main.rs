//! `shallowdirac`: plot-ready data for bound states of a 1D Dirac particle in
//! short-range wells.
//!
//! Exit status: 0 on success, 1 when some points (or the whole run) failed, 2 for an
//! invalid configuration.

mod args;
mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::Parser;

use crate::commands::Status;
use crate::config::ConfigError;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli.command) {
        Ok(Status::Complete) => ExitCode::SUCCESS,
        Ok(Status::Partial { failed, total }) => {
            eprintln!("warning: {failed} of {total} points failed; see the error column");
            ExitCode::from(1)
        }
        Err(e) if e.downcast_ref::<ConfigError>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
