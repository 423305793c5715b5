//! Command-line front end: scenario files, simulation runs, cross-checks and data export.

pub mod check;
pub mod export;
pub mod info;
pub mod run;
pub mod scenario;
pub mod threads;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid scenario or arguments; exit status 2.
    #[error("{field}: {message}")]
    Config { field: String, message: String },
    /// The integration left the closed domain; exit status 3.
    #[error("{0}")]
    Diverged(bsd_kuramoto_core::Error),
    /// A cross-check exceeded its tolerance; exit status 1.
    #[error("{0}")]
    CheckFailed(String),
    #[error(transparent)]
    Model(bsd_kuramoto_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Diverged(_) => 3,
            _ => 1,
        }
    }
}

impl From<bsd_kuramoto_core::Error> for CliError {
    fn from(e: bsd_kuramoto_core::Error) -> Self {
        match e {
            bsd_kuramoto_core::Error::DivergenceDetected { .. } => CliError::Diverged(e),
            e => CliError::Model(e),
        }
    }
}
