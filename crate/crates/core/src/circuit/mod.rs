//! Circuit IR and unitary construction.
//!
//! Gate lists are temporal: the first gate acts first, so a circuit
//! `[g_1, …, g_l]` builds the matrix `G_l ⋯ G_1`.

mod families;
mod parse;
pub mod random;

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, StateVector};
use crate::scalar::{Backend, ExactScalar, Scalar};

pub use families::{
    ccz_clifford_t, exp_ix, special_family, special_family_clifford_t, toffoli_clifford_t,
};
pub use parse::{parse, ParseError, ParseErrorKind};

/// Default width cap for building dense unitaries (128 × 128).
pub const DEFAULT_MAX_UNITARY_QUBITS: usize = 7;

const PHASE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Cnot,
    Cz,
    Swap,
    /// Multi-controlled Z with the given number of controls.
    Ckz(usize),
    /// Diagonal unitary, one unit-modulus phase per local basis state.
    Diag(Vec<Complex64>),
    /// Arbitrary unitary; float backends only.
    Custom(Matrix<Complex64>),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Swap => 2,
            GateKind::Ckz(c) => c + 1,
            GateKind::Diag(p) => p.len().trailing_zeros() as usize,
            GateKind::Custom(m) => m.n(),
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::I => "i",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Cnot => "cnot",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Ckz(2) => "ccz",
            GateKind::Ckz(_) => "ckz",
            GateKind::Diag(_) => "diag",
            GateKind::Custom(_) => "custom",
        }
    }

    pub fn is_t(&self) -> bool {
        matches!(self, GateKind::T | GateKind::Tdg)
    }

    pub fn is_clifford(&self) -> bool {
        match self {
            GateKind::T | GateKind::Tdg | GateKind::Diag(_) | GateKind::Custom(_) => false,
            GateKind::Ckz(c) => *c <= 1,
            _ => true,
        }
    }

    /// Clifford gates plus T and T†.
    pub fn is_clifford_t(&self) -> bool {
        self.is_clifford() || self.is_t()
    }

    /// Whether the exact backend can build this gate.
    pub fn exact_representable(&self) -> bool {
        match self {
            GateKind::Custom(_) => false,
            GateKind::Diag(p) => p.iter().all(|&z| ExactScalar::from_c64(z).is_some()),
            _ => true,
        }
    }

    /// The gate's matrix on its own qubits, first listed qubit most
    /// significant.
    pub fn local_matrix<S: Scalar>(&self) -> Result<Matrix<S>> {
        let o = S::one;
        let z = S::zero;
        let m = match self {
            GateKind::I => Matrix::identity(1),
            GateKind::X => Matrix::from_rows(1, vec![z(), o(), o(), z()])?,
            GateKind::Y => Matrix::from_rows(1, vec![z(), -S::i(), S::i(), z()])?,
            GateKind::Z => Matrix::diagonal(vec![o(), -o()])?,
            GateKind::H => {
                let h = S::inv_sqrt2();
                Matrix::from_rows(1, vec![h.clone(), h.clone(), h.clone(), -h])?
            }
            GateKind::S => Matrix::diagonal(vec![o(), S::i()])?,
            GateKind::Sdg => Matrix::diagonal(vec![o(), -S::i()])?,
            GateKind::T => Matrix::diagonal(vec![o(), S::omega()])?,
            GateKind::Tdg => Matrix::diagonal(vec![o(), S::omega().conj()])?,
            GateKind::Cnot => Matrix::from_fn(2, |r, c| {
                let target = if c >= 2 { c ^ 1 } else { c };
                if r == target {
                    o()
                } else {
                    z()
                }
            }),
            GateKind::Cz => Matrix::diagonal(vec![o(), o(), o(), -o()])?,
            GateKind::Swap => Matrix::from_fn(2, |r, c| {
                let swapped = ((c & 1) << 1) | (c >> 1);
                if r == swapped {
                    o()
                } else {
                    z()
                }
            }),
            GateKind::Ckz(c) => {
                let dim = 1usize << (c + 1);
                Matrix::diagonal((0..dim).map(|k| if k == dim - 1 { -o() } else { o() }).collect())?
            }
            GateKind::Diag(phases) => {
                let entries = phases
                    .iter()
                    .map(|&p| {
                        S::from_c64(p).ok_or_else(|| Error::BackendUnsupported {
                            gate: format!("diag phase {p}"),
                            backend: S::BACKEND,
                        })
                    })
                    .collect::<Result<Vec<S>>>()?;
                Matrix::diagonal(entries)?
            }
            GateKind::Custom(m) => {
                if S::BACKEND == Backend::Exact {
                    return Err(Error::BackendUnsupported { gate: "custom".into(), backend: S::BACKEND });
                }
                let data = m
                    .data()
                    .iter()
                    .map(|&v| S::from_c64(v).expect("float backends accept any value"))
                    .collect();
                Matrix::from_rows(m.n(), data)?
            }
        };
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "`{}` acts on {} qubits, got {}",
                kind.name(),
                kind.arity(),
                qubits.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(q) = qubits.iter().find(|q| !seen.insert(**q)) {
            return Err(Error::InvalidGate(format!("repeated qubit index {q}")));
        }
        match &kind {
            GateKind::Diag(p) => {
                if p.is_empty() || !p.len().is_power_of_two() {
                    return Err(Error::InvalidGate(format!("diag needs 2^k phases, got {}", p.len())));
                }
                if let Some(bad) = p.iter().find(|z| (z.norm() - 1.0).abs() > PHASE_TOLERANCE) {
                    return Err(Error::NonUnitPhase(bad.to_string()));
                }
            }
            GateKind::Custom(m) if !m.is_unitary() => return Err(Error::NotUnitary),
            _ => {}
        }
        Ok(Gate { kind, qubits })
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    fn single(kind: GateKind, q: usize) -> Self {
        Gate { kind, qubits: vec![q] }
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q)
    }

    pub fn s(q: usize) -> Self {
        Self::single(GateKind::S, q)
    }

    pub fn t(q: usize) -> Self {
        Self::single(GateKind::T, q)
    }

    pub fn tdg(q: usize) -> Self {
        Self::single(GateKind::Tdg, q)
    }

    pub fn x(q: usize) -> Self {
        Self::single(GateKind::X, q)
    }

    pub fn z(q: usize) -> Self {
        Self::single(GateKind::Z, q)
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        Gate::new(GateKind::Cnot, vec![control, target])
    }

    /// C^{k-1}Z on the listed qubits.
    pub fn ckz(qubits: Vec<usize>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::InvalidGate("ckz needs at least one qubit".into()));
        }
        Gate::new(GateKind::Ckz(qubits.len() - 1), qubits)
    }
}

/// A diagonal gate from its phases; they must have unit modulus.
pub fn diag_from_phases(phases: Vec<Complex64>, qubits: Vec<usize>) -> Result<Gate> {
    Gate::new(GateKind::Diag(phases), qubits)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    name: Option<String>,
}

impl Circuit {
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidGate("circuit width must be at least 1".into()));
        }
        Ok(Circuit { width, gates: Vec::new(), name: None })
    }

    pub fn from_gates(width: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Circuit::new(width)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(q) = gate.qubits.iter().find(|&&q| q >= self.width) {
            return Err(Error::InvalidGate(format!(
                "qubit {q} out of range for width {}",
                self.width
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if self.width != other.width {
            return Err(Error::QubitMismatch { left: self.width, right: other.width });
        }
        let mut c = self.clone();
        c.gates.extend(other.gates.iter().cloned());
        Ok(c)
    }

    /// Occurrences of T and T†. An upper bound on the T-count of the
    /// circuit's unitary.
    pub fn count_t_gates(&self) -> usize {
        self.gates.iter().filter(|g| g.kind.is_t()).count()
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(|g| g.kind.is_clifford())
    }

    pub fn is_clifford_t(&self) -> bool {
        self.gates.iter().all(|g| g.kind.is_clifford_t())
    }

    pub fn exact_representable(&self) -> bool {
        self.gates.iter().all(|g| g.kind.exact_representable())
    }

    pub fn to_text(&self) -> Result<String> {
        parse::serialize(self)
    }
}

impl std::str::FromStr for Circuit {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        parse(s)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_text() {
            Ok(t) => f.write_str(&t),
            Err(_) => write!(f, "<circuit on {} qubits with {} gates>", self.width, self.gates.len()),
        }
    }
}

/// Left-multiplies the row block `data` (`2^n` rows of `cols` entries) by
/// the gate's embedding.
fn apply_gate<S: Scalar>(data: &mut [S], n: usize, cols: usize, gate: &Gate) -> Result<()> {
    let local = gate.kind.local_matrix::<S>()?;
    let k = gate.qubits.len();
    let ldim = 1usize << k;
    let sparse: Vec<Vec<(usize, S)>> = (0..ldim)
        .map(|r| {
            (0..ldim)
                .filter(|&c| !local.get(r, c).is_zero())
                .map(|c| (c, local.get(r, c).clone()))
                .collect()
        })
        .collect();
    let offsets: Vec<usize> = (0..ldim)
        .map(|l| {
            gate.qubits
                .iter()
                .enumerate()
                .filter(|(j, _)| (l >> (k - 1 - j)) & 1 == 1)
                .map(|(_, &q)| 1usize << (n - 1 - q))
                .sum()
        })
        .collect();
    let mask: usize = gate.qubits.iter().map(|&q| 1usize << (n - 1 - q)).sum();
    let mut block: Vec<Vec<S>> = vec![Vec::new(); ldim];
    for base in (0..1usize << n).filter(|b| b & mask == 0) {
        for (l, off) in offsets.iter().enumerate() {
            let start = (base + off) * cols;
            block[l] = data[start..start + cols].to_vec();
        }
        for (r, terms) in sparse.iter().enumerate() {
            let start = (base + offsets[r]) * cols;
            let row = &mut data[start..start + cols];
            for (j, out) in row.iter_mut().enumerate() {
                let mut acc = S::zero();
                for (c, v) in terms {
                    let x = &block[*c][j];
                    if !x.is_zero() {
                        acc.add_assign_ref(&v.mul_ref(x));
                    }
                }
                *out = acc;
            }
        }
    }
    Ok(())
}

/// The circuit's unitary, capped at [`DEFAULT_MAX_UNITARY_QUBITS`].
pub fn build_unitary<S: Scalar>(c: &Circuit) -> Result<Matrix<S>> {
    build_unitary_capped(c, DEFAULT_MAX_UNITARY_QUBITS)
}

pub fn build_unitary_capped<S: Scalar>(c: &Circuit, max_qubits: usize) -> Result<Matrix<S>> {
    if c.width > max_qubits {
        return Err(Error::CapExceeded { what: "unitary", n: c.width, cap: max_qubits });
    }
    let mut u = Matrix::identity(c.width);
    let dim = u.dim();
    for g in &c.gates {
        apply_gate(u.data_mut(), c.width, dim, g)?;
    }
    Ok(u)
}

/// Runs the circuit on a state without materializing the unitary.
pub fn apply_to_state<S: Scalar>(c: &Circuit, psi: &StateVector<S>) -> Result<StateVector<S>> {
    if psi.n() != c.width {
        return Err(Error::QubitMismatch { left: c.width, right: psi.n() });
    }
    let mut out = psi.clone();
    for g in &c.gates {
        apply_gate(out.amplitudes_mut(), c.width, 1, g)?;
    }
    Ok(out)
}
