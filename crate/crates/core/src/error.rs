use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected} qubits, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("n = {n} is outside the supported range {min}..={max}")]
    UnsupportedSize { n: usize, min: usize, max: usize },

    #[error("{0} qubits is too many for a dense representation")]
    DimensionOverflow(usize),

    #[error("unknown gate kind `{0}`")]
    UnknownGateKind(String),

    #[error("unknown ansatz id {0}")]
    UnknownAnsatz(usize),

    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("unsupported encoding: {0}")]
    UnsupportedEncoding(String),

    #[error("twirled gate {gate} has non-commuting Pauli terms")]
    NonCommutingOrbit { gate: usize },

    #[error("parameter x{0} is not assigned")]
    UnassignedSymbol(usize),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
