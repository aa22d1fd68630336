use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input data or parameters violate a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An object was used before it was ready, e.g. an unresolved median bandwidth.
    #[error("invalid state: {0}")]
    State(String),

    /// The request is well-formed but the chosen method does not support it.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
