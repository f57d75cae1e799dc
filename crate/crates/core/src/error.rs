use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A basis or expansion would exceed the supported word width or size.
    #[error("capacity exceeded: {0}")]
    Size(String),

    /// Arguments outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
