use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported matrix dimension {0} (expected 2 or 4)")]
    UnsupportedDimension(usize),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error(
        "dephasing functions do not define a positive map (min eigenvalue {min_eigenvalue:e})"
    )]
    MapNotPositive { min_eigenvalue: f64 },

    #[error("correlation {0} outside [-1, 1]")]
    InvalidCorrelation(f64),

    #[error("covariance is singular for |K| = 1; use the characteristic function instead")]
    SingularCovariance,

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "adaptive quadrature did not converge (estimated error {error:e}, tolerance {tolerance:e})"
    )]
    QuadratureNotConverged { error: f64, tolerance: f64 },

    #[error(
        "Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:e})"
    )]
    EigenNotConverged { sweeps: usize, off_diagonal: f64 },
}

impl Error {
    /// Failures of an iterative numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNotConverged { .. } | Error::EigenNotConverged { .. }
        )
    }
}
