//! Shared error type for the library.

use thiserror::Error;

/// Errors produced by library operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not Hermitian: max entry deviation {deviation:.3e} exceeds {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("dimension {d} outside supported range {min}..={max}")]
    UnsupportedDimension { d: usize, min: usize, max: usize },

    #[error("invalid fiducial: {0}")]
    InvalidFiducial(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("invalid conditional probability matrix: {0}")]
    InvalidConditional(String),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error(
        "fiducial search did not converge: best frame-potential error {best:.3e} \
         exceeds {tol:.3e} after {restarts} restarts"
    )]
    Convergence { best: f64, tol: f64, restarts: usize },

    #[error("samples do not span the space: rank {rank} < {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error(
        "samples are inconsistent with a linear functional: residual {residual:.3e} \
         at sample {index} exceeds {tol:.3e}"
    )]
    Inconsistent { residual: f64, index: usize, tol: f64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unknown outcome '{0}'")]
    UnknownOutcome(String),
}

pub type Result<T> = std::result::Result<T, Error>;
