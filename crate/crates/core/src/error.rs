use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands act on different numbers of qubits.
    DimensionMismatch { expected: usize, found: usize },
    /// A dense operation was requested above the configured qubit limit.
    Capacity { qubits: usize, limit: usize },
    /// An evolution plan would exceed the query budget.
    Budget { requested: f64, limit: u64 },
    /// A matrix that must be unitary is not, by the given deviation.
    NotUnitary { deviation: f64 },
    InvalidArgument(String),
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Capacity and budget errors are resource limits rather than misuse.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::Capacity { .. } | Error::Budget { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "qubit count mismatch: expected {expected}, found {found}")
            }
            Error::Capacity { qubits, limit } => {
                write!(f, "{qubits} qubits exceeds the dense limit of {limit}")
            }
            Error::Budget { requested, limit } => {
                write!(f, "evolution needs {requested:.3e} queries, budget is {limit}")
            }
            Error::NotUnitary { deviation } => {
                write!(f, "matrix is not unitary (deviation {deviation:.3e})")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
