use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("malformed datetime {input:?}: bad {field}")]
    DateTimeField { field: &'static str, input: String },
    #[error("malformed date {input:?}: bad {field}")]
    DateField { field: &'static str, input: String },
    #[error("timestamp {0} is outside years 1970..=9999")]
    OutOfRange(i64),
    #[error("malformed amount {0:?}")]
    Money(String),
    #[error("path must contain at least two vertices")]
    ShortPath,
    #[error("unknown truncation order {0:?}")]
    TruncationOrder(String),
    #[error("truncation limit must be positive")]
    TruncationLimit,
}
