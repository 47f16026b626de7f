//! Error taxonomy shared by every simulator module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid value or combination in a parameter struct.
    #[error("configuration error: {0}")]
    Config(String),
    /// Degenerate geometry, e.g. coincident endpoints.
    #[error("geometry error: {0}")]
    Geometry(String),
    /// Argument outside a function's numeric domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// API misuse that violates a documented contract.
    #[error("contract violation: {0}")]
    Contract(String),
    /// File I/O failure, with the offending path.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
