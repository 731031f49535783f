//! Experiment front end for `mimo-sim`: configuration, sweep axes, the
//! sweeps and the acceptance validation suite.

pub mod axis;
pub mod config;
pub mod scene;
pub mod sweeps;
pub mod validate;

use std::fmt;

pub use config::{ExperimentConfig, Length};
pub use scene::{Context, ZetaSpec};

/// Failures surfaced by the CLI, each mapped to a process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad arguments or configuration (exit 2).
    Usage(String),
    /// One or more validation criteria failed (exit 1).
    Validation(String),
    /// A numeric routine failed (exit 3).
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<mimo_core::Error> for CliError {
    fn from(e: mimo_core::Error) -> Self {
        match e {
            mimo_core::Error::InvalidArgument(m) => CliError::Usage(m),
            other => CliError::Numeric(other.to_string()),
        }
    }
}
