use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid tuple: {0}")]
    InvalidTuple(String),
    #[error("model is not Green hyperbolic: {0}")]
    NotGreenHyperbolic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
