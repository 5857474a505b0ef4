use thiserror::Error;

use crate::scalar::Backend;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} on {n} qubits exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },

    #[error("invalid Pauli label: {0}")]
    InvalidLabel(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("gate `{gate}` cannot be represented in the {backend} backend")]
    BackendUnsupported { gate: String, backend: Backend },

    #[error("phase {0} does not have unit modulus")]
    NonUnitPhase(String),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not unitary")]
    NotUnitary,

    #[error("Pauli function value has imaginary part {0:e}")]
    ImaginaryPart(f64),

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("unsound bound: nullity {bound} exceeds the {t_gates} T gates of the circuit")]
    UnsoundBound { bound: u32, t_gates: usize },

    #[error("W is Clifford (nullity 0); no finite synthesis bound exists")]
    CliffordDivisor,

    #[error("bit strings have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("custom gates cannot be serialized to the text format")]
    Unserializable,

    #[error(transparent)]
    Parse(#[from] crate::circuit::ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
