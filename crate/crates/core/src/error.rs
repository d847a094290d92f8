use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter or scenario violates one of its invariants.
    #[error("configuration error: {0}")]
    Config(String),
    /// Input data is malformed (non-finite samples, too short, asymmetric...).
    #[error("data error: {0}")]
    Data(String),
    /// A linear system could not be solved reliably.
    #[error("singular matrix (condition estimate {condition:e})")]
    Singular { condition: f64 },
    /// The adaptive filter produced a non-finite value.
    #[error("controller diverged at sample {sample}")]
    Diverged { sample: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn data_err(msg: impl Into<String>) -> Error {
    Error::Data(msg.into())
}
