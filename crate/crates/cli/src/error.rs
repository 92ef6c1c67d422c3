use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("{context}: {source}")]
    Io {
        context: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{failed} of {total} sweep points failed; first: {first}")]
    PartialFailure {
        failed: usize,
        total: usize,
        first: String,
    },
    #[error(transparent)]
    Core(#[from] cqed_core::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(context: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    /// 2: configuration or validation, 3: numerics, 4: I/O.
    pub fn exit_code(&self) -> i32 {
        use cqed_core::Error as E;
        match self {
            CliError::Config { .. } => 2,
            CliError::Io { .. } => 4,
            CliError::PartialFailure { .. } => 3,
            CliError::Core(e) => match e {
                E::InvalidParameter { .. } | E::DimensionMismatch { .. } | E::Empty(_) => 2,
                E::Io { .. } | E::Format { .. } | E::Truncated { .. } => 4,
                _ => 3,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "config",
            3 => "numerics",
            _ => "io",
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let mut body = json!({
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let CliError::Config { path, .. } = self {
            body["path"] = json!(path);
        }
        json!({ "error": body })
    }
}
