//! Stabilizer nullity of states and unitaries, with exact and
//! floating-point backends.

pub mod circuit;
pub mod error;
pub mod matrix;
pub mod nullity;
pub mod pauli;
pub mod scalar;
pub mod stabilizer;
pub mod theorems;

pub use circuit::{build_unitary, Circuit, Gate, GateKind};
pub use error::{Error, Result};
pub use matrix::{Matrix, StateVector};
pub use nullity::{
    compute_s_state, compute_s_unitary, gate_synthesis_lower_bound, t_count_lower_bound, NullityReport,
    TCountBound,
};
pub use pauli::{LabelSubgroup, PauliLabel, PhasedPauli};
pub use scalar::{Backend, ExactScalar, Scalar};

pub type Complex64 = num_complex::Complex64;
pub type Complex32 = num_complex::Complex32;

pub type ExactMatrix = Matrix<ExactScalar>;
pub type FloatMatrix = Matrix<Complex64>;
pub type Float32Matrix = Matrix<Complex32>;
pub type ExactState = StateVector<ExactScalar>;
pub type FloatState = StateVector<Complex64>;
pub type Float32State = StateVector<Complex32>;
