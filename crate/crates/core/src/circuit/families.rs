//! Named circuits.

use num_complex::Complex64;

use super::{Circuit, Gate, GateKind};
use crate::matrix::Matrix;

/// `C^{n-1}Z · H^{⊗n} · C^{n-1}Z`, whose unitary stabilizer nullity is 2n
/// for n ≥ 3. For n = 1 the controlled-Z degenerates to Z.
pub fn special_family(n: usize) -> Circuit {
    assert!(n >= 1, "special_family needs at least one qubit");
    let ckz = || {
        if n == 1 {
            Gate::z(0)
        } else {
            Gate::ckz((0..n).collect()).expect("distinct qubits")
        }
    };
    let mut gates = vec![ckz()];
    gates.extend((0..n).map(Gate::h));
    gates.push(ckz());
    Circuit::from_gates(n, gates).expect("valid").with_name(format!("special_family({n})"))
}

/// A 7-T Clifford+T expansion of CCZ on qubits `a`, `b`, `c`.
pub fn ccz_clifford_t(a: usize, b: usize, c: usize) -> Vec<Gate> {
    let cx = |x, y| Gate::cnot(x, y).expect("distinct qubits");
    vec![
        cx(b, c),
        Gate::tdg(c),
        cx(a, c),
        Gate::t(c),
        cx(b, c),
        Gate::tdg(c),
        cx(a, c),
        Gate::t(b),
        Gate::t(c),
        cx(a, b),
        Gate::t(a),
        Gate::tdg(b),
        cx(a, b),
    ]
}

/// The textbook 7-T Toffoli (controls 0, 1; target 2).
pub fn toffoli_clifford_t() -> Circuit {
    let mut gates = vec![Gate::h(2)];
    gates.extend(ccz_clifford_t(0, 1, 2));
    gates.push(Gate::h(2));
    Circuit::from_gates(3, gates).expect("valid").with_name("toffoli_7t")
}

/// [`special_family`] with each controlled-Z replaced by its Clifford+T
/// expansion. Only defined for n = 3.
pub fn special_family_clifford_t() -> Circuit {
    let mut gates = ccz_clifford_t(0, 1, 2);
    gates.extend((0..3).map(Gate::h));
    gates.extend(ccz_clifford_t(0, 1, 2));
    Circuit::from_gates(3, gates).expect("valid").with_name("special_family_clifford_t(3)")
}

/// `e^{iX} = cos(1)·I + i·sin(1)·X` on `qubit`.
pub fn exp_ix(qubit: usize) -> Gate {
    let (c, s) = (1f64.cos(), 1f64.sin());
    let m = Matrix::from_rows(
        1,
        vec![
            Complex64::new(c, 0.0),
            Complex64::new(0.0, s),
            Complex64::new(0.0, s),
            Complex64::new(c, 0.0),
        ],
    )
    .expect("2x2");
    Gate::new(GateKind::Custom(m), vec![qubit]).expect("e^{iX} is unitary")
}
