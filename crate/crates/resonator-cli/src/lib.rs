//! Experiment runner around [`resonator_core`]: configuration, the
//! single-modulus pipeline, resumable scans over prime grids, persistent
//! JSONL/CSV output, and an invariant verification suite.
//!
//! The binary (`resonator`) is a thin clap front end over these modules;
//! everything here is callable as a library so integration tests can drive
//! scans in-process.
//!
//! Error discipline mirrors the process exit codes: [`CliError::Validation`]
//! exits 1 (bad arguments or configuration), [`CliError::Invariant`] exits 2
//! (a mathematical invariant failed at runtime), [`CliError::Io`] exits 3.

pub mod config;
pub mod engine;
pub mod records;
pub mod scan;
pub mod verify;

use resonator_core::CoreError;

/// Top-level error, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Rejected input: arguments, config file, or domain preconditions.
    #[error("validation: {0}")]
    Validation(String),
    /// A runtime invariant that should hold mathematically did not.
    #[error("invariant: {0}")]
    Invariant(String),
    /// Filesystem or serialization failure.
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Invariant(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            // Internal errors are self-checks tripping inside the core —
            // invariant territory. Everything else is a precondition the
            // caller (ultimately the user's input) violated.
            CoreError::Internal(_) => CliError::Invariant(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
