use thiserror::Error;

use crate::domain::Cell;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no path to cell {goal}")]
    NoPath { goal: Cell },
    #[error("unsolvable: no feasible coalition for task {task}")]
    Unsolvable { task: String },
    #[error("malformed document: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
