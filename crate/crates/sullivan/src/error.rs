use crate::dsl::{Diagnostic, Pos};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("syntax error at {0}")]
    Syntax(#[from] Diagnostic),
    #[error("line {}, column {}: {message}", pos.line, pos.col)]
    Resolve { pos: Pos, message: String },
    #[error("{0}")]
    Core(#[from] sullivan_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn resolve(pos: Pos, message: impl Into<String>) -> Self {
        CliError::Resolve {
            pos,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    /// 3 for internal inconsistencies, 2 for everything caused by the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_internal() => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
