use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the dispatch library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("infeasible control at step {step}: {detail}")]
    InfeasibleControl { step: usize, detail: String },

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("LP at step {step} did not reach optimality ({status}): {diagnostics}")]
    Solver {
        step: usize,
        status: String,
        diagnostics: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable class name, used by the CLI.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Validation(_) => "validation",
            Error::Configuration(_) => "configuration",
            Error::InfeasibleControl { .. } => "infeasible-control",
            Error::Scenario(_) => "scenario",
            Error::Solver { .. } => "solver",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
