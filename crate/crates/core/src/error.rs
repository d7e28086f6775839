//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A size or index bound was violated (oracle caps, insufficient draws).
    #[error("size error: {0}")]
    Size(String),

    /// A grid is too coarse to represent the requested object without aliasing.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A matrix expected to be positive semidefinite is not, beyond the clamp.
    #[error("matrix not positive semidefinite: min eigenvalue {min_eig:e} below clamp {clamp:e}")]
    NotPsd { min_eig: f64, clamp: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn size(msg: impl Into<String>) -> Self {
        Error::Size(msg.into())
    }

    pub fn resolution(msg: impl Into<String>) -> Self {
        Error::Resolution(msg.into())
    }
}
