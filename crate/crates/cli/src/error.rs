use std::path::Path;

use serde_json::json;
use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ordered_ridge::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("config {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("replay differs from the manifest: {0}")]
    NotReproduced(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
            CliError::Config { .. } => "config",
            CliError::Json(_) => "json",
            CliError::NotReproduced(_) => "not_reproduced",
        }
    }

    /// 1 for I/O and parse failures, 2 for invalid input, 3 for numerical
    /// failures, 4 when a replay does not match.
    pub fn exit_code(&self) -> u8 {
        use ordered_ridge::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Core(
                E::InvalidParameter(_)
                | E::DimensionMismatch { .. }
                | E::NonMonotone { .. }
                | E::OutOfDomain { .. }
                | E::DegenerateDenominator { .. }
                | E::ZeroColumn(_)
                | E::UnknownLabel(_)
                | E::TooLarge { .. }
                | E::Parse { .. }
                | E::Index { .. }
                | E::Csv(_),
            ) => 2,
            CliError::Core(
                E::NonFinite(_) | E::NotPositiveDefinite { .. } | E::NotSymmetric { .. },
            ) => 3,
            CliError::NotReproduced(_) => 4,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
        .to_string()
    }
}
