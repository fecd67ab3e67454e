use thiserror::Error;

/// Failures surfaced by the library.
///
/// The variants map onto the CLI exit-code taxonomy: `Input` is a caller
/// mistake, everything else is a computational or capability limit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("capability limit: {0}")]
    Capability(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("undetermined spectral boundary: {0}")]
    Undetermined(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn capability<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capability(msg.into()))
}
