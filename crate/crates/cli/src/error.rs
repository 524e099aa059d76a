use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Parse(String),

    #[error("config: `{path}`: {reason}")]
    Invalid { path: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("simulation blew up at t = {t:.6} s: {reason}")]
    BlowUp { t: f64, reason: String },

    #[error("optimizer: {0}")]
    Optimizer(String),
}

impl CliError {
    pub fn invalid(path: &str, reason: &str) -> Self {
        Self::Invalid { path: path.to_owned(), reason: reason.to_owned() }
    }

    pub fn field(path: &str, err: batflight::Error) -> Self {
        Self::Invalid { path: path.to_owned(), reason: err.to_string() }
    }

    /// 1 for configuration and I/O problems, 2 for a diverged run, 3 when the
    /// optimizer cannot produce a result.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Invalid { .. } | CliError::Io { .. } => 1,
            CliError::BlowUp { .. } => 2,
            CliError::Optimizer(_) => 3,
        }
    }
}
