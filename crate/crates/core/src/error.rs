use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("observable has non-real phase {0}")]
    NonHermitianObservable(String),

    #[error("density-matrix capacity exceeded: {requested} qubits requested, cap is {cap}")]
    CapacityExceeded { requested: usize, cap: usize },

    #[error("postselection accepted zero probability mass")]
    ZeroAcceptance,

    #[error("amplitudes are not normalized (|a|^2+|b|^2 = {0})")]
    NotNormalized(f64),

    #[error("qubit {0} is used twice")]
    QubitCollision(usize),

    #[error("code distance must be odd and at least 1, got {0}")]
    EvenDistance(usize),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("cannot fit a decay rate to an all-zero series")]
    DegenerateSeries,

    #[error("terms {0} and {1} in one group are not qubit-wise compatible")]
    IncompatibleGrouping(String, String),

    #[error("fault site {0} is not in the catalog")]
    UnknownSite(usize),

    #[error("ambiguous classification: output matches both {0} and {1}")]
    AmbiguousClassification(String, String),

    #[error("the encoded Ising circuit supports exactly two sites, got {0}")]
    UnsupportedChainLength(usize),

    #[error("circuit contains a gate the basis-state backend cannot run: {0}")]
    NonClassicalGate(String),

    #[error("bias-preservation violation: {0}")]
    BiasViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
