use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^31")]
    InvalidModulus(u64),
    #[error("matrix {0} is not invertible")]
    Singular(String),
    #[error("malformed matrix `{0}`, expected a:b:c:d")]
    MalformedMatrix(String),
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
    #[error("unknown subgroup type `{0}`")]
    UnknownType(String),
    #[error("subgroup does not contain -I")]
    MissingMinusIdentity,
    #[error("element set is not closed under multiplication")]
    NotASubgroup,
    #[error("l = {ell} exceeds the configured enumeration bound {bound}")]
    BoundExceeded { ell: u32, bound: u32 },
    #[error("target {0} is outside the classified theorems")]
    UnsupportedTarget(String),
    #[error("j-expression: {0}")]
    Expression(String),
    #[error("no subgroup with projective image {0} found at l = {1}")]
    LiftNotFound(String, u32),
    #[error("malformed record: {0}")]
    Record(String),
    #[error("{0}")]
    Precondition(String),
}
