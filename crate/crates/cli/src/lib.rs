//! Batch front end: configuration, run orchestration and CSV/JSON outputs.

pub mod commands;
pub mod config;
pub mod output;

use sgn_core::SgnError;
use thiserror::Error;

pub use config::{Config, ConvergeSection, DtRule};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] SgnError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for numerical breakdown during a run, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}
