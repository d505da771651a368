use std::fmt;

use hamlearn_core::Error as CoreError;

/// Errors surfaced by the command line, each with a fixed exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or malformed input documents.
    Input(String),
    Core(CoreError),
    Io(String),
}

impl CliError {
    /// 2 for usage errors, 3 for capacity or budget limits, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Core(e) if e.is_resource_limit() => 3,
            CliError::Core(CoreError::InvalidArgument(_) | CoreError::Parse(_) | CoreError::DimensionMismatch { .. }) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "invalid input: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
