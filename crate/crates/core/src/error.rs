use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("elements live in different ambient algebras")]
    AmbientMismatch,
    #[error("subalgebra is not abelian")]
    NotAbelian,
    #[error("subalgebra is not a MASA of its ambient algebra")]
    NotMasa,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix does not preserve the ambient metric")]
    MetricViolation,
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
