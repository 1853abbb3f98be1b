use std::fmt;
use std::path::PathBuf;

use matchsim_core::Error as CoreError;

/// Process exit status for each error class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const DIMENSION: i32 = 3;
    pub const ORACLE_CEILING: i32 = 4;
    pub const NUMERIC: i32 = 5;
}

/// A syntax or validation error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },

    #[error("invalid argument {what}: {message}")]
    Argument { what: &'static str, message: String },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("total variation {tv:e} exceeds tolerance {tolerance:e}")]
    Mismatch { tv: f64, tolerance: f64 },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse { .. } | Self::Argument { .. } => exit::PARSE,
            Self::Io { .. } => exit::IO,
            Self::Mismatch { .. } => exit::NUMERIC,
            Self::Core(e) => match e {
                CoreError::DimensionMismatch { .. }
                | CoreError::OutcomeLength { .. }
                | CoreError::ModeOutOfRange { .. }
                | CoreError::ParameterCount { .. } => exit::DIMENSION,
                CoreError::TooLarge { .. } => exit::ORACLE_CEILING,
                CoreError::ImaginaryResidual { .. } | CoreError::NonFiniteLoss | CoreError::NonFiniteParameter => exit::NUMERIC,
                _ => exit::PARSE,
            },
        }
    }
}
