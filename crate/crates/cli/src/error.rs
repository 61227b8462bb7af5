use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the binary, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("parameters: {0}")]
    Params(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("numerical failure: {0}")]
    Numerical(evtcr::Error),

    #[error("{0}")]
    OutOfRegime(evtcr::Error),

    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } | CliError::Params(_) => 1,
            CliError::Io { .. } | CliError::Csv(_) => 1,
            CliError::Numerical(_) | CliError::Verification(_) => 2,
            CliError::OutOfRegime(_) => 3,
        }
    }
}

impl From<evtcr::Error> for CliError {
    fn from(e: evtcr::Error) -> Self {
        match e {
            evtcr::Error::OutOfRegime(_) => CliError::OutOfRegime(e),
            other => CliError::Numerical(other),
        }
    }
}
