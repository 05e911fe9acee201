use thiserror::Error;

/// Errors raised anywhere in the simulation and protocol stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("gate targets must be distinct, got {0:?}")]
    DuplicateTargets(Vec<usize>),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("qubit selection must not be empty")]
    EmptySelection,
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("{qubits} qubits exceed the exact-evolution cap of {cap}")]
    TooManyQubits { qubits: usize, cap: usize },
    #[error("probability {value} for {what} is outside [0, 1]")]
    ProbabilityOutOfRange { what: String, value: f64 },
    #[error("unknown topology `{0}`")]
    UnknownTopology(String),
    #[error("unknown calibration profile `{0}`")]
    UnknownProfile(String),
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("invalid calibration profile: {0}")]
    InvalidProfile(String),
    #[error("no cycle found in topology `{0}` and no explicit vertex order given")]
    NoCycle(String),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(usize, usize),
    #[error("pair ({0}, {1}) has no chain: an endpoint lacks a distinct outer neighbour")]
    NoChain(usize, usize),
    #[error("post-selected branch has probability {0:e}, below the floor")]
    ZeroProbabilityBranch(f64),
    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("every eigenvalue was clipped; cannot renormalise")]
    DegenerateMatrix,
    #[error("subsystem size {0} outside the supported range 1..=4")]
    SubsystemSize(usize),
    #[error("tomography data missing setting {0}")]
    MissingSetting(String),
    #[error("key length must be even and positive, got {0}")]
    InvalidKeyLength(usize),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("message value {0} does not fit in two bits")]
    InvalidMessage(u8),
    #[error("input must not be empty")]
    EmptyInput,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed document {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    /// True when the error stems from the caller's input rather than a
    /// numerical or internal failure.
    pub fn is_user_error(&self) -> bool {
        !matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidDensityMatrix(_)
                | Error::DegenerateMatrix
                | Error::ZeroProbabilityBranch(_)
                | Error::MissingSetting(_)
                | Error::TooManyQubits { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
