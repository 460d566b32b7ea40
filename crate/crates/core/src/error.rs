use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("eigen-iteration did not converge within {max_iter} iterations")]
    NoConvergence { max_iter: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("signal must be nonzero and finite")]
    ZeroSignal,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("penalty rho = {rho} is below the required {required}")]
    RhoTooSmall { rho: f64, required: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("feasible (alpha, beta) region is empty")]
    InfeasibleRegion,
}
