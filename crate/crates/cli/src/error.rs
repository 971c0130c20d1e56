use std::path::PathBuf;

/// Failure classes, each with its own process exit code so scripts can
/// distinguish bad invocations from bad mathematics.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Exit 1: the invocation or config file is malformed.
    #[error("config: {0}")]
    Config(String),
    /// Exit 2: a solver or kernel evaluation failed.
    #[error("numeric: {0}")]
    Numeric(#[from] fractoback_core::Error),
    /// Exit 3: the run completed but an acceptance flag is false.
    #[error("acceptance: {0}")]
    Acceptance(String),
    /// Exit 4: filesystem trouble on an output path.
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Acceptance(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
