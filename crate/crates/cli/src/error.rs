//! Error classification and exit codes.

use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(#[from] sqzc_core::Error),
    /// Some sweep points failed; their outputs were still written.
    #[error("{0}")]
    PointsFailed(String),
    #[error("I/O error on {path}: {message}")]
    Io { path: PathBuf, message: String },
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    exit_code: i32,
    message: String,
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.to_path_buf(), message: e.to_string() }
    }

    /// Re-tags core errors that stem from bad input rather than a failed
    /// solve.
    pub fn classify(self) -> Self {
        use sqzc_core::Error as E;
        match self {
            CliError::Solver(E::Io { path, source }) => CliError::Io { path, message: source.to_string() },
            CliError::Solver(e @ (E::InvalidParameter(_) | E::ConfigMismatch(_) | E::Format(_))) => CliError::Config(e.to_string()),
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) | CliError::PointsFailed(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Solver(_) | CliError::PointsFailed(_) => "solver",
            CliError::Io { .. } => "io",
        }
    }

    /// One-line JSON report for stderr.
    pub fn to_json(&self) -> String {
        let r = ErrorReport { error: self.kind(), exit_code: self.exit_code(), message: self.to_string() };
        serde_json::to_string(&r).expect("report serializes")
    }
}
