use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("quadrature did not converge: {0}")]
    NoConvergence(String),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("bad discriminant {0}")]
    BadDiscriminant(i64),
    #[error("non-integral coefficients: {0}")]
    NonIntegralCoefficients(String),
    #[error("series truncated at order {have}, need {needed}")]
    TruncationTooShort { needed: usize, have: usize },
    #[error("strategy cannot reach eps: {0}")]
    StrategyPrecisionExceeded(String),
    #[error("tail bound {bound:e} exceeds eps {eps:e}")]
    TailBoundExceeded { bound: f64, eps: f64 },
    #[error("singular linear system")]
    SingularSystem,
    #[error("conjugacy violated: {0}")]
    ConjugacyViolation(String),
    #[error("kernel is not a subgroup: {0}")]
    KernelNotSubgroup(String),
    #[error("AGM branch failure: {0}")]
    AgmBranchFailure(String),
    #[error("not near an integer: {0}")]
    NotNearInteger(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
