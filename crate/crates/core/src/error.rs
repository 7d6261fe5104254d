use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside its validity domain.
    #[error("{field}: {message}")]
    InvalidParam { field: String, message: String },

    #[error("scenario: {0}")]
    InvalidScenario(String),

    #[error("strategy {name}: {message}")]
    InvalidStrategy { name: String, message: String },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("stationary solve ill-conditioned (residual {residual:e})")]
    IllConditioned { residual: f64 },

    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn param(field: &str, message: impl Into<String>) -> Self {
        Error::InvalidParam {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// Short machine-readable category used in CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParam { .. } => "param",
            Error::InvalidScenario(_) => "scenario",
            Error::InvalidStrategy { .. } => "strategy",
            Error::Config { .. } => "config",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Io { .. } => "io",
        }
    }
}
