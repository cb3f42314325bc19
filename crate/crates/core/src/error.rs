use thiserror::Error;

/// Errors raised by the simulation, builder and training layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("parameter binding error: trainable index {index} but only {available} parameters supplied")]
    Binding { index: usize, available: usize },

    #[error("expected {expected} parameters, got {got}")]
    ParamCount { expected: usize, got: usize },

    #[error("qubit index {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("invalid ansatz specification: {0}")]
    InvalidSpec(String),

    #[error("unsupported entanglement structure `{0}`")]
    UnsupportedStructure(String),

    #[error("dataset must contain at least one point with matching x and y lengths")]
    EmptyDataset,

    #[error("need at least {needed} samples to resolve degree {degree}, got {got}")]
    TooFewSamples { needed: usize, got: usize, degree: usize },

    #[error("probability {0} outside [0, 1]")]
    Probability(f64),

    #[error("noise model: {0}")]
    NoiseModel(String),

    #[error("all target functions must share one degree (found {0} and {1})")]
    MixedDegrees(usize, usize),

    #[error("{what} limited to {max} qubits, got {got}")]
    TooManyQubits { what: &'static str, max: usize, got: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
