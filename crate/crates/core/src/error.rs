use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix or vector has a non-finite entry")]
    NotFinite,

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("matrix deviates from Hermitian by {deviation:e} (limit {limit:e})")]
    TooFarFromHermitian { deviation: f64, limit: f64 },

    #[error("matrix deviates from anti-Hermitian by {deviation:e}")]
    NotAntiHermitian { deviation: f64 },

    #[error("state vector has norm {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("not a density operator: {reason}")]
    NotDensity { reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("random state draw degenerated after {attempts} attempts")]
    DegenerateDraw { attempts: usize },

    #[error("covariance is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("estimator configuration invalid: {0}")]
    InvalidEstimator(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
