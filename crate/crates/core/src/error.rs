use thiserror::Error;

/// Errors raised by the library. The CLI maps [`Error::exit_code`] onto its
/// process exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("self-loop on node {0} is not a valid dyad")]
    SelfLoop(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("support violation: {0}")]
    Support(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("enumeration refused: {0}")]
    TooLarge(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("sampler failure: {0}")]
    Runtime(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// 1 for anything caught before computation starts, 2 for failures at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::InvalidParameter(_)
            | Error::Validation(_)
            | Error::TooLarge(_)
            | Error::NodeOutOfRange { .. }
            | Error::SelfLoop(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
