use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] travelwave_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("config {path}: {reason}")]
    Config { path: PathBuf, reason: String },
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
    #[error("verification failed for {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) if e.is_validation() => "validation",
            CliError::Core(_) => "numerical",
            CliError::Usage(_) | CliError::Config { .. } => "validation",
            CliError::Io { .. } | CliError::Csv(_) | CliError::Json(_) => "io",
            CliError::VerificationFailed(_) => "verification",
        }
    }

    /// 1 for bad input, 2 for everything that failed while running.
    pub fn exit_code(&self) -> u8 {
        if self.kind() == "validation" {
            1
        } else {
            2
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: ErrorBody<'a>,
}

/// One-line JSON for the error stream.
pub fn error_json(kind: &str, message: String) -> String {
    serde_json::to_string(&ErrorReport {
        error: ErrorBody { kind, message },
    })
    .unwrap_or_else(|_| format!("{{\"error\":{{\"kind\":\"{kind}\"}}}}"))
}
