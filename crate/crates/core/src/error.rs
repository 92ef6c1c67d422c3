use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the cavity-QED library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("integration step underflow at t = {t:e} s (step {step:e} s)")]
    StepUnderflow { t: f64, step: f64 },

    #[error("integration exceeded {max_steps} steps before t = {t_end:e} s")]
    TooManySteps { max_steps: usize, t_end: f64 },

    #[error("non-converged integral: residual excitation {residual:e} at horizon {horizon:e} s")]
    NonConverged { residual: f64, horizon: f64 },

    #[error("state invariant violated: {0}")]
    InvariantViolation(String),

    #[error("quantity is undefined: {0}")]
    Undefined(String),

    #[error("spectral grid too coarse: drift sigma {sigma:e} < 2 x spacing {spacing:e}")]
    GridTooCoarse { sigma: f64, spacing: f64 },

    #[error("empty distribution: {0}")]
    Empty(String),

    #[error("malformed grid file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("truncated payload in {path}: expected {expected} bytes, found {found}")]
    Truncated {
        path: PathBuf,
        expected: u64,
        found: u64,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
