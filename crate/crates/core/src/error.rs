use thiserror::Error;

/// Errors produced by the simulator, the analytic formulas and the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),

    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("register of {0} qubits exceeds the {max}-qubit cap", max = crate::quantum::MAX_QUBITS)]
    Capacity(usize),

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("measured qubits must be distinct (got {0} twice)")]
    QubitClash(usize),

    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),

    #[error("Kraus pair is not complete (max deviation {0:e})")]
    IncompleteKraus(f64),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid distortion ({u}, {v}): components must be positive")]
    InvalidDistortion { u: f64, v: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("chain of {hops} hops is too long for exact enumeration (max {max})")]
    TooLarge { hops: usize, max: usize },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
