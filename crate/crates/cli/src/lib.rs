//! Config-driven experiment runner for `singlab`.

use std::path::PathBuf;

use singlab::ErrorClass;
use thiserror::Error;

pub mod config;
pub mod output;
pub mod presets;
pub mod report;
pub mod run;

pub use config::ExperimentConfig;
pub use report::RunReport;
pub use run::{Artifacts, Format};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error(transparent)]
    Lab(#[from] singlab::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid report {}: {message}", path.display())]
    Report { path: PathBuf, message: String },
    #[error("report for '{scenario}' has {found}, expected {expected}")]
    SchemaMismatch { scenario: String, found: String, expected: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::UnknownPreset(_) | CliError::Report { .. } | CliError::SchemaMismatch { .. } => {
                EXIT_CONFIG
            }
            CliError::Lab(e) => match e.class() {
                ErrorClass::Argument => EXIT_CONFIG,
                ErrorClass::Numerical => EXIT_NUMERICAL,
                ErrorClass::Precondition => EXIT_PRECONDITION,
            },
            CliError::Io { .. } | CliError::Json(_) | CliError::Csv(_) => EXIT_IO,
        }
    }
}
