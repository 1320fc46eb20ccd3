use thiserror::Error;

pub type Result<T> = std::result::Result<T, DafError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DafError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}", validation_message(*.line, .message))]
    Validation {
        line: Option<usize>,
        message: String,
    },
    #[error("argument universe exceeds the hard cap of {cap} arguments")]
    BoundExceeded { cap: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

fn validation_message(line: Option<usize>, message: &str) -> String {
    match line {
        Some(line) => format!("validation error at line {line}: {message}"),
        None => format!("validation error: {message}"),
    }
}

impl DafError {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        DafError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn validation(line: Option<usize>, message: impl Into<String>) -> Self {
        DafError::Validation {
            line,
            message: message.into(),
        }
    }
}
