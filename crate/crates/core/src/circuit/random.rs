//! Seeded random circuits for property checks.

use rand::Rng;

use super::{Circuit, Gate, GateKind};

fn random_gate<R: Rng + ?Sized>(n: usize, rng: &mut R, with_t: bool) -> Gate {
    let singles: &[GateKind] = if with_t {
        &[GateKind::H, GateKind::S, GateKind::T, GateKind::Tdg, GateKind::X, GateKind::Sdg]
    } else {
        &[GateKind::H, GateKind::S, GateKind::X, GateKind::Z, GateKind::Sdg]
    };
    if n >= 2 && rng.gen_bool(0.3) {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let kind = if rng.gen_bool(0.75) { GateKind::Cnot } else { GateKind::Cz };
        return Gate::new(kind, vec![a, b]).expect("distinct qubits");
    }
    let kind = singles[rng.gen_range(0..singles.len())].clone();
    Gate::new(kind, vec![rng.gen_range(0..n)]).expect("one qubit")
}

/// A random word over {H, S, S†, X, Z, CNOT, CZ}.
pub fn random_clifford<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Circuit {
    Circuit::from_gates(n, (0..len).map(|_| random_gate(n, rng, false))).expect("valid")
}

/// A random word over {H, S, S†, X, T, T†, CNOT, CZ}.
pub fn random_clifford_t<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Circuit {
    Circuit::from_gates(n, (0..len).map(|_| random_gate(n, rng, true))).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_clifford_t(3, 20, &mut ChaCha8Rng::seed_from_u64(5));
        let b = random_clifford_t(3, 20, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
        assert!(a.is_clifford_t());
        assert!(random_clifford(3, 40, &mut ChaCha8Rng::seed_from_u64(1)).is_clifford());
        assert_eq!(random_clifford(1, 10, &mut ChaCha8Rng::seed_from_u64(2)).gates().len(), 10);
    }
}
