use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the estimators, the simulation harness and the CLI layer.
#[derive(Debug, Error)]
pub enum FgtError {
    #[error("invalid bandwidth {0}: bandwidth must be finite and > 0")]
    InvalidBandwidth(f64),

    #[error("income sample is empty")]
    EmptySample,

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {message} (best estimate {best_estimate}, error estimate {error_estimate:e})")]
    NumericalFailure {
        message: String,
        best_estimate: f64,
        error_estimate: f64,
    },

    #[error("degenerate case: {0}")]
    DegenerateCase(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown kernel `{0}` (available: gaussian)")]
    UnknownKernel(String),

    #[error("cannot read `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("no valid income rows in `{}` ({} row errors)", path.display(), errors.len())]
    NoValidRows { path: PathBuf, errors: Vec<String> },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, FgtError>;

pub(crate) fn check_bandwidth(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(FgtError::InvalidBandwidth(h))
    }
}
