use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("size guard exceeded: {0}")]
    SizeGuardExceeded(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vector is not in the kernel of the matrix")]
    NotInKernel,

    /// Only reachable with a corrupted basis.
    #[error("conformal decomposition failed: {0}")]
    DecompositionFailed(String),

    #[error("point is infeasible: {0}")]
    InfeasiblePoint(String),

    #[error("norm bound violated: {0}")]
    BoundViolated(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
