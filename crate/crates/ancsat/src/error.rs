use std::path::PathBuf;

/// Errors from experiment execution, persistence and the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] ancsat_core::Error),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Analysis(String),
    #[error("{context} {}: {source}", path.display())]
    Io {
        context: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {kind} in {}: {message}", path.display())]
    Format { kind: &'static str, path: PathBuf, message: String },
    #[error("run {scenario}/{algorithm} diverged at sample {sample}")]
    Diverged { scenario: String, algorithm: String, sample: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 2 configuration, 3 divergence, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(ancsat_core::Error::Diverged { .. }) | Error::Diverged { .. } => 3,
            Error::Io { .. } | Error::Format { .. } => 4,
            _ => 2,
        }
    }

    pub(crate) fn io(context: &'static str, path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { context, path: path.into(), source }
    }
}
