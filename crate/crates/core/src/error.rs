use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("graph error: {0}")]
    Graph(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    /// A bound or closed form whose preconditions do not hold for the input.
    #[error("inapplicable: {0}")]
    Inapplicable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
