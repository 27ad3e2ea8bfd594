use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one of the CLI exit
/// classes (invariant violation, unsupported parameter, I/O).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("not a discriminant: {0}")]
    NotDiscriminant(i64),

    #[error("point {0} is outside the kite domain (0, p/(p+1)]")]
    OutsideKite(String),

    #[error("Dirichlet inverse does not exist: g(1) = 0")]
    NotInvertible,

    #[error("input is too supersingular for the canonical branch: {0}")]
    TooSupersingular(String),

    #[error("insufficient p-adic precision: {0}")]
    InsufficientPrecision(String),

    #[error("bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
