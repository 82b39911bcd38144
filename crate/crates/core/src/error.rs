use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),
    #[error("unsupported type tag `{0}`")]
    UnknownType(String),
    #[error("{0} is not defined in type G2")]
    G2Unsupported(&'static str),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
    #[error("ad power must be non-negative, got {0}")]
    NegativePower(i64),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn inconsistency(msg: impl Into<String>) -> Error {
    Error::Inconsistency(msg.into())
}
