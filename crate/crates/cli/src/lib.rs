//! Subcommands of the `stable-agg` tool. Each command turns a
//! [`RunConfig`] into the text of one CSV or JSON-lines artifact.

pub mod commands;
pub mod config;

pub use config::{Flags, RunConfig};

use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Library(#[from] stable_agg::Error),
    #[error("{failed} of {total} verification runs failed")]
    VerificationFailed { failed: usize, total: usize, output: String },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::VerificationFailed { .. } => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    }
}

/// Formats a float for CSV with 17 significant digits.
pub(crate) fn num(x: f64) -> String {
    format!("{x:.16e}")
}
