use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("`{0}` is not a grid location id (expected \"x,y\")")]
    NotGridId(String),

    #[error("location `{id}` lies outside grid {grid}")]
    OutsideGrid { id: String, grid: String },

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: &'static str, message: String },

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("sampling from an empty weight table")]
    ZeroWeight,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: &'static str, message: impl Into<String>) -> Self {
        Error::Config {
            field,
            message: message.into(),
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
