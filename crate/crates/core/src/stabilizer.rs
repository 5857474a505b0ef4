//! Stabilizer states at small n, the maximally entangled state, and the
//! state-versus-unitary nullity comparisons.

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::random::random_clifford;
use crate::circuit::{apply_to_state, Circuit, Gate};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, StateVector, MAX_DENSE_QUBITS};
use crate::nullity::compute_s_state;
use crate::scalar::Scalar;

pub const MAX_STABILIZER_ENUM_QUBITS: usize = 4;

/// Default number of sampled ancillas when full enumeration is out of reach.
pub const DEFAULT_ANCILLA_SAMPLES: usize = 200;

/// Amplitudes are rounded to multiples of 2^-20 for deduplication.
const GRID: f64 = (1u64 << 20) as f64;

#[derive(Clone, Debug)]
pub struct StabilizerStateSet<S> {
    n: usize,
    states: Vec<StateVector<S>>,
    depths: Vec<usize>,
}

impl<S: Scalar> StabilizerStateSet<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[StateVector<S>] {
        &self.states
    }

    /// BFS depth at which each state was first reached.
    pub fn depths(&self) -> &[usize] {
        &self.depths
    }

    pub fn max_depth(&self) -> usize {
        self.depths.iter().copied().max().unwrap_or(0)
    }

    /// Position of the state equal to `psi` up to global phase.
    pub fn position(&self, psi: &StateVector<S>) -> Option<usize> {
        let key = canonical_key(&psi.phase_canonical()?);
        self.states.iter().position(|s| canonical_key(s) == key)
    }

    /// JSON array with one entry per state, each a list of `[re, im]` pairs.
    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<[f64; 2]>> = self
            .states
            .iter()
            .map(|s| s.amplitudes().iter().map(|a| a.to_c64()).map(|c| [c.re, c.im]).collect())
            .collect();
        serde_json::to_string(&rows).expect("amplitudes serialize")
    }
}

fn canonical_key<S: Scalar>(psi: &StateVector<S>) -> Vec<(i64, i64)> {
    psi.amplitudes()
        .iter()
        .map(|a| {
            let c = a.to_c64();
            ((c.re * GRID).round() as i64, (c.im * GRID).round() as i64)
        })
        .collect()
}

fn generators(n: usize) -> Vec<Circuit> {
    let mut gates = Vec::new();
    for q in 0..n {
        gates.push(Gate::h(q));
        gates.push(Gate::s(q));
    }
    for a in 0..n {
        for b in 0..n {
            if a != b {
                gates.push(Gate::cnot(a, b).expect("distinct qubits"));
            }
        }
    }
    gates.into_iter().map(|g| Circuit::from_gates(n, [g]).expect("valid")).collect()
}

/// Orbit of `|0…0⟩` under H, S and CNOT, deduplicated up to global phase.
pub fn enumerate_stabilizer_states<S: Scalar>(n: usize) -> Result<StabilizerStateSet<S>> {
    if n == 0 || n > MAX_STABILIZER_ENUM_QUBITS {
        return Err(Error::CapExceeded { what: "stabilizer enumeration", n, cap: MAX_STABILIZER_ENUM_QUBITS });
    }
    let gens = generators(n);
    let start = StateVector::<S>::zero_state(n);
    let mut seen = HashSet::from([canonical_key(&start)]);
    let mut states = vec![start];
    let mut depths = vec![0];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &gens {
            let next = apply_to_state(g, &states[i])?;
            let canon = next
                .phase_canonical()
                .ok_or_else(|| Error::Integrity("stabilizer state without a representable phase".into()))?;
            if seen.insert(canonical_key(&canon)) {
                states.push(canon);
                depths.push(depths[i] + 1);
                queue.push_back(states.len() - 1);
            }
        }
    }
    Ok(StabilizerStateSet { n, states, depths })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateMax {
    pub max: u32,
    /// Lowest index in the set attaining the maximum.
    pub argmax: usize,
}

/// `max_ψ v_s(U|ψ⟩)` over the set.
pub fn max_state_nullity<S: Scalar>(u: &Matrix<S>, set: &StabilizerStateSet<S>) -> Result<StateMax> {
    if u.n() != set.n {
        return Err(Error::QubitMismatch { left: u.n(), right: set.n });
    }
    let values = state_nullities(u, set.states())?;
    let max = values.iter().copied().max().unwrap_or(0);
    let argmax = values.iter().position(|&v| v == max).unwrap_or(0);
    Ok(StateMax { max, argmax })
}

/// `v_s(U|ψ⟩)` for each state, in order.
pub fn state_nullities<S: Scalar>(u: &Matrix<S>, states: &[StateVector<S>]) -> Result<Vec<u32>> {
    states
        .par_iter()
        .map(|psi| Ok(compute_s_state(&u.apply(psi)?)?.nullity))
        .collect()
}

/// `(1/√2^n) Σ_x |x⟩|x⟩` on 2n qubits.
pub fn maximally_entangled<S: Scalar>(n: usize) -> Result<StateVector<S>> {
    if n == 0 || 2 * n > MAX_DENSE_QUBITS {
        return Err(Error::CapExceeded { what: "maximally entangled state", n: 2 * n, cap: MAX_DENSE_QUBITS });
    }
    let a = S::inv_sqrt2_pow(n as u32);
    let mut amps = vec![S::zero(); 1 << (2 * n)];
    for x in 0..1usize << n {
        amps[(x << n) | x] = a.clone();
    }
    StateVector::from_amplitudes(2 * n, amps)
}

/// `(I_{2^d} ⊗ U)|φ⟩`, with `U` on the last n qubits.
pub fn apply_on_last<S: Scalar>(u: &Matrix<S>, phi: &StateVector<S>) -> Result<StateVector<S>> {
    let n = u.n();
    if phi.n() < n {
        return Err(Error::QubitMismatch { left: n, right: phi.n() });
    }
    let block = 1usize << n;
    let mut out = Vec::with_capacity(phi.amplitudes().len());
    for chunk in phi.amplitudes().chunks(block) {
        let v = StateVector::from_amplitudes(n, chunk.to_vec())?;
        out.extend_from_slice(u.apply(&v)?.amplitudes());
    }
    StateVector::from_amplitudes(phi.n(), out)
}

/// `v_s((I_{2^d} ⊗ U)|φ⟩)`.
pub fn aux_nullity<S: Scalar>(u: &Matrix<S>, ancilla_state: &StateVector<S>) -> Result<u32> {
    if ancilla_state.n() > MAX_DENSE_QUBITS {
        return Err(Error::CapExceeded { what: "ancilla state", n: ancilla_state.n(), cap: MAX_DENSE_QUBITS });
    }
    Ok(compute_s_state(&apply_on_last(u, ancilla_state)?)?.nullity)
}

/// `C|0…0⟩` for a random Clifford word `C`.
pub fn random_stabilizer_state<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector<S>> {
    let c = random_clifford(n, 4 * n * n + 8, rng);
    apply_to_state(&c, &StateVector::zero_state(n))
}

/// Stabilizer ancillas on `m` qubits: the full enumeration when `m` is
/// small enough, otherwise `samples` random ones. When `m ≥ 2·n_u` the
/// padded maximally entangled state is included as well.
pub fn ancilla_pool<S: Scalar, R: Rng + ?Sized>(
    m: usize,
    n_u: usize,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<StateVector<S>>> {
    let mut pool = if m <= 3 {
        enumerate_stabilizer_states::<S>(m)?.states
    } else {
        (0..samples).map(|_| random_stabilizer_state(m, rng)).collect::<Result<_>>()?
    };
    if n_u >= 1 && m >= 2 * n_u {
        let phi = maximally_entangled::<S>(n_u)?;
        let pad = m - 2 * n_u;
        pool.push(if pad == 0 { phi } else { StateVector::zero_state(pad).tensor(&phi)? });
    }
    Ok(pool)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PaddingReport {
    pub d: usize,
    pub d_prime: usize,
    pub best_d: u32,
    pub best_d_prime: u32,
    /// Every d′-ancilla padded with `|0⟩^{d−d′}` kept its value.
    pub padding_preserved: bool,
    pub holds: bool,
}

/// Compares the best ancilla-assisted state nullity with `d` and `d′`
/// ancilla qubits. The `d` pool includes each `d′` ancilla padded with
/// `|0⟩^{⊗(d−d′)}`, whose value must be unchanged.
pub fn padding_monotonicity_check<S: Scalar, R: Rng + ?Sized>(
    u: &Matrix<S>,
    d: usize,
    d_prime: usize,
    samples: usize,
    rng: &mut R,
) -> Result<PaddingReport> {
    if d < d_prime {
        return Err(Error::InvalidGate(format!("padding needs d ≥ d′, got {d} < {d_prime}")));
    }
    let n = u.n();
    let small = ancilla_pool::<S, R>(d_prime + n, n, samples, rng)?;
    let small_vals: Vec<u32> = small.par_iter().map(|p| aux_nullity(u, p)).collect::<Result<_>>()?;

    let mut padding_preserved = true;
    let mut large = ancilla_pool::<S, R>(d + n, n, samples, rng)?;
    let mut large_vals: Vec<u32> = large.par_iter().map(|p| aux_nullity(u, p)).collect::<Result<_>>()?;
    if d > d_prime {
        let zeros = StateVector::<S>::zero_state(d - d_prime);
        let padded: Vec<_> = small.iter().map(|p| zeros.tensor(p)).collect::<Result<_>>()?;
        let padded_vals: Vec<u32> = padded.par_iter().map(|p| aux_nullity(u, p)).collect::<Result<_>>()?;
        padding_preserved = padded_vals == small_vals;
        large.extend(padded);
        large_vals.extend(padded_vals);
    }
    let best_d = large_vals.into_iter().max().unwrap_or(0);
    let best_d_prime = small_vals.into_iter().max().unwrap_or(0);
    Ok(PaddingReport {
        d,
        d_prime,
        best_d,
        best_d_prime,
        padding_preserved,
        holds: padding_preserved && best_d >= best_d_prime,
    })
}

/// Position of `|+⟩^{⊗n}` in the set.
pub fn plus_state_index<S: Scalar>(set: &StabilizerStateSet<S>) -> Option<usize> {
    set.position(&StateVector::plus_state(set.n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_unitary, special_family, GateKind};
    use crate::nullity::compute_s_unitary;
    use crate::scalar::ExactScalar as E;
    use num_complex::Complex64 as C;
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn product_formula(n: u32) -> usize {
        (1..=n).map(|k| (1usize << k) + 1).product::<usize>() << n
    }

    #[test]
    fn enumeration_counts() {
        for n in 1..=3 {
            let set = enumerate_stabilizer_states::<C>(n).unwrap();
            assert_eq!(set.len(), product_formula(n as u32), "n={n}");
        }
        assert_eq!(enumerate_stabilizer_states::<E>(2).unwrap().len(), 60);
        assert!(matches!(enumerate_stabilizer_states::<C>(5), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn single_qubit_states_are_the_six_axes() {
        let set = enumerate_stabilizer_states::<E>(1).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let axes = [
            [C::new(1.0, 0.0), C::new(0.0, 0.0)],
            [C::new(0.0, 0.0), C::new(1.0, 0.0)],
            [C::new(h, 0.0), C::new(h, 0.0)],
            [C::new(h, 0.0), C::new(-h, 0.0)],
            [C::new(h, 0.0), C::new(0.0, h)],
            [C::new(h, 0.0), C::new(0.0, -h)],
        ];
        for a in axes {
            let psi = StateVector::from_amplitudes(1, a.to_vec()).unwrap();
            let found = set.states().iter().any(|s| s.to_float().approx_eq(&psi));
            assert!(found, "{a:?}");
        }
        assert_eq!(set.depths()[0], 0);
    }

    #[test]
    fn enumerated_states_have_zero_nullity() {
        let set = enumerate_stabilizer_states::<E>(2).unwrap();
        for psi in set.states() {
            assert_eq!(compute_s_state(psi).unwrap().nullity, 0);
        }
    }

    #[test]
    fn json_export_shape() {
        let set = enumerate_stabilizer_states::<C>(1).unwrap();
        let v: Vec<Vec<[f64; 2]>> = serde_json::from_str(&set.to_json()).unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(v[0], vec![[1.0, 0.0], [0.0, 0.0]]);
    }

    #[test]
    fn ccz_state_maximum() {
        let set = enumerate_stabilizer_states::<E>(3).unwrap();
        let ccz = build_unitary::<E>(&"qubits 3\nccz 0 1 2\n".parse().unwrap()).unwrap();
        let m = max_state_nullity(&ccz, &set).unwrap();
        assert_eq!(m.max, 3);
        let plus = plus_state_index(&set).unwrap();
        assert_eq!(state_nullities(&ccz, &set.states()[plus..=plus]).unwrap(), vec![3]);
    }

    #[test]
    fn clifford_state_maximum_is_zero() {
        let set = enumerate_stabilizer_states::<E>(2).unwrap();
        let c = build_unitary::<E>(&"qubits 2\nh 0\ncnot 0 1\ns 1\n".parse().unwrap()).unwrap();
        assert_eq!(max_state_nullity(&c, &set).unwrap().max, 0);
    }

    #[test]
    fn bell_state() {
        let phi = maximally_entangled::<E>(1).unwrap();
        let h = E::inv_sqrt2();
        let want = StateVector::from_amplitudes(2, vec![h.clone(), E::zero(), E::zero(), h]).unwrap();
        assert_eq!(phi, want);
        let r = compute_s_state(&phi).unwrap();
        assert_eq!((r.s, r.nullity), (4, 0));
        assert_eq!(compute_s_state(&maximally_entangled::<E>(2).unwrap()).unwrap().nullity, 0);
    }

    #[test]
    fn aux_with_bell_matches_unitary_nullity() {
        let t: Matrix<E> = GateKind::T.local_matrix().unwrap();
        assert_eq!(aux_nullity(&t, &maximally_entangled(1).unwrap()).unwrap(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let c = crate::circuit::random::random_clifford_t(2, 12, &mut rng);
            let u = build_unitary::<E>(&c).unwrap();
            let phi = maximally_entangled(2).unwrap();
            assert_eq!(aux_nullity(&u, &phi).unwrap(), compute_s_unitary(&u).unwrap().nullity);
        }
    }

    #[test]
    fn apply_on_last_matches_tensor_with_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = crate::circuit::random::random_clifford_t(1, 6, &mut rng);
        let u = build_unitary::<E>(&c).unwrap();
        let psi = random_stabilizer_state::<E, _>(3, &mut rng).unwrap();
        let big = Matrix::<E>::identity(2).tensor(&u).unwrap();
        assert_eq!(apply_on_last(&u, &psi).unwrap(), big.apply(&psi).unwrap());
    }

    #[test]
    fn padding_examples() {
        let t: Matrix<E> = GateKind::T.local_matrix().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = padding_monotonicity_check(&t, 1, 0, 20, &mut rng).unwrap();
        assert!(r.holds);
        assert_eq!((r.best_d, r.best_d_prime), (1, 1));

        let c: Matrix<E> = GateKind::H.local_matrix().unwrap();
        let r = padding_monotonicity_check(&c, 1, 0, 20, &mut rng).unwrap();
        assert!(r.holds);
        assert_eq!((r.best_d, r.best_d_prime), (0, 0));
    }

    #[test]
    fn special_family_ancilla_beats_plain_inputs() {
        let u = build_unitary::<C>(&special_family(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = padding_monotonicity_check(&u, 3, 0, 10, &mut rng).unwrap();
        assert!(r.holds);
        assert_eq!(r.best_d, 6);
        assert!(r.best_d_prime <= 3);
    }
}
