//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("size cap exceeded: {0}")]
    Size(String),

    #[error("quadrature failed to converge: {detail} (achieved residual {residual:.3e})")]
    Quadrature { detail: String, residual: f64 },

    #[error("series truncation cap reached: certified bound {bound:.3e} >= tolerance {tol:.3e}")]
    Accuracy { bound: f64, tol: f64 },

    #[error("grid does not resolve the embedding windows: {0}")]
    GridResolution(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
