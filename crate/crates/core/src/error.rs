use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, DfsError>;

#[derive(Debug, Error)]
pub enum DfsError {
    #[error("point is not on the unit sphere (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("{what} must be a positive even integer, got {value}")]
    OddDimension { what: &'static str, value: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("spectral set exceeds the coefficient range: {0}")]
    OutOfRange(String),

    #[error("coefficient table is not BMC-symmetric (max relative deviation {max_rel:.3e})")]
    SymmetryViolation { max_rel: f64 },

    #[error("non-finite function value at ({x}, {y}, {z})")]
    NonFinite { x: f64, y: f64, z: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
