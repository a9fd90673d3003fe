use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {n} exceeds the principal-minor limit of {max}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("bad subsystem dimensions {dims:?}; expected two equal factors")]
    BadDims { dims: Vec<usize> },

    #[error("parameter outside its domain: {0}")]
    BadDomain(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("state is not circulant (deviation {deviation:e})")]
    NotCirculant { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("absorber D[{i}][{j}] would be negative ({value:e})")]
    NegativeAbsorber { i: usize, j: usize, value: f64 },

    #[error("state is not symmetrically extendible: {0}")]
    NotExtendible(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
