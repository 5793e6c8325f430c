use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |m - m^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("negative eigenvalue {0:e} below tolerance")]
    NegativeEigenvalue(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("channel is not trace preserving (max |sum M^dagger M - I| = {deviation:e})")]
    NotTracePreserving { deviation: f64 },

    #[error("cross-block overlap {overlap:e} exceeds tolerance")]
    CrossBlockOverlap { overlap: f64 },

    #[error("large side dimension {large} is smaller than blocks * d = {required}")]
    DimensionShortfall { large: usize, required: usize },

    #[error("dimension {0} is not prime")]
    NonPrimeDimension(usize),

    #[error("no single measurement setting separates the candidates (best overlapping pairs: {best_overlaps}, setting {witness})")]
    NoPerfectSetting {
        best_overlaps: usize,
        witness: String,
    },

    #[error("secret state is not among the candidates")]
    SecretNotCandidate,
}

pub type Result<T> = std::result::Result<T, Error>;
