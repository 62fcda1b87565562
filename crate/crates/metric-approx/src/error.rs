use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("{what} exceeded the cap of {cap}")]
    Overflow { what: &'static str, cap: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("no assignment for element {0}")]
    MissingAssignment(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("field mismatch")]
    FieldMismatch,
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("kernel meets the ball at {0}")]
    KernelMeetsBall(String),
    #[error("upstream certificate failed verification: {0}")]
    Upstream(String),
    #[error("constructed certificate failed verification: {0}")]
    VerificationFailed(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
