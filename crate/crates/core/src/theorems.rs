//! A named, seeded battery of checks over the nullity machinery.
//!
//! Every check draws from its own RNG stream derived from `(seed, name)`,
//! so any single check can be replayed with [`run_check`].

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::circuit::random::{random_clifford, random_clifford_t};
use crate::circuit::{
    build_unitary, ccz_clifford_t, exp_ix, special_family, special_family_clifford_t, toffoli_clifford_t,
    Circuit, Gate, GateKind,
};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, StateVector};
use crate::nullity::{
    compute_s_state, compute_s_unitary, conjugate_and_detect, stab_group, subgroup_p_u, t_count_lower_bound,
    unitary_pauli_function,
};
use crate::pauli::{LabelSubgroup, PauliLabel, PhasedPauli};
use crate::scalar::{ExactScalar as E, Scalar};
use crate::stabilizer::{
    ancilla_pool, aux_nullity, enumerate_stabilizer_states, max_state_nullity, maximally_entangled,
    padding_monotonicity_check, plus_state_index, state_nullities,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Smoke,
    Standard,
    Deep,
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Smoke => "smoke",
            Scale::Standard => "standard",
            Scale::Deep => "deep",
        })
    }
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "smoke" => Ok(Scale::Smoke),
            "standard" => Ok(Scale::Standard),
            "deep" => Ok(Scale::Deep),
            other => Err(format!("unknown scale `{other}` (expected smoke, standard or deep)")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Params {
    circuits: usize,
    pairs: usize,
    subgroups: usize,
    f_random: usize,
    ancillas: usize,
    deep: bool,
}

impl Scale {
    fn params(self) -> Params {
        match self {
            Scale::Smoke => Params { circuits: 12, pairs: 40, subgroups: 50, f_random: 1000, ancillas: 10, deep: false },
            Scale::Standard => {
                Params { circuits: 50, pairs: 500, subgroups: 200, f_random: 10_000, ancillas: 50, deep: false }
            }
            Scale::Deep => {
                Params { circuits: 100, pairs: 1000, subgroups: 500, f_random: 20_000, ancillas: 200, deep: true }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub seed: u64,
    pub scale: Scale,
    /// Inputs and both sides of the checked relation; on failure, the
    /// first offending cases.
    pub witness: Value,
    pub elapsed_ms: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub scale: Scale,
    /// Deliberately corrupts one expected value, so the battery must fail.
    pub inject_fault: bool,
}

impl RunOptions {
    pub fn new(seed: u64, scale: Scale) -> Self {
        RunOptions { seed, scale, inject_fault: false }
    }
}

type CheckFn = fn(&mut ChaCha8Rng, Params, bool) -> Result<(bool, Value)>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("t_transfer_matrix", check_t_transfer_matrix),
    ("faithfulness", check_faithfulness),
    ("clifford_invariance", check_clifford_invariance),
    ("tensor_additivity", check_tensor_additivity),
    ("subadditivity", check_subadditivity),
    ("intersection_bound", check_intersection_bound),
    ("adjoint_congruence", check_adjoint_congruence),
    ("integrality", check_integrality),
    ("state_stab_equivalence", check_state_stab_equivalence),
    ("lagrange", check_lagrange),
    ("nonzero_pattern", check_nonzero_pattern),
    ("fixed_v_uniqueness", check_fixed_v_uniqueness),
    ("diagonal_equality", check_diagonal_equality),
    ("comparison_domination", check_comparison_domination),
    ("aux_attainment", check_aux_attainment),
    ("padding_monotonicity", check_padding),
    ("theorem_2n", check_theorem_2n),
    ("f_closed_form", check_f_closed_form),
    ("strict_separation", check_strict_separation),
    ("state_subadditivity_counterexample", check_state_counterexample),
    ("transpose_trick", check_transpose_trick),
    ("soundness", check_soundness),
    ("backend_agreement", check_backend_agreement),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// FNV-1a, used only to give each check a stable RNG stream.
fn stream_seed(seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

fn run_one(name: &str, f: CheckFn, opts: RunOptions) -> CheckResult {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(opts.seed, name));
    let (passed, witness) = match f(&mut rng, opts.scale.params(), opts.inject_fault) {
        Ok(r) => r,
        Err(e) => (false, json!({ "error": e.to_string() })),
    };
    CheckResult {
        name: name.to_string(),
        passed,
        seed: opts.seed,
        scale: opts.scale,
        witness,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Runs every check concurrently; results come back in a fixed order.
pub fn run_all(seed: u64, scale: Scale) -> Vec<CheckResult> {
    run_all_with(RunOptions::new(seed, scale))
}

pub fn run_all_with(opts: RunOptions) -> Vec<CheckResult> {
    CHECKS.par_iter().map(|&(name, f)| run_one(name, f, opts)).collect()
}

pub fn run_check(name: &str, seed: u64, scale: Scale) -> Option<CheckResult> {
    run_check_with(name, RunOptions::new(seed, scale))
}

pub fn run_check_with(name: &str, opts: RunOptions) -> Option<CheckResult> {
    CHECKS.iter().find(|c| c.0 == name).map(|&(name, f)| run_one(name, f, opts))
}

/// Collects pass/fail over many cases, keeping the first few failures.
#[derive(Default)]
struct Tally {
    cases: usize,
    failures: Vec<Value>,
    total_failures: usize,
}

impl Tally {
    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok {
            self.total_failures += 1;
            if self.failures.len() < 5 {
                self.failures.push(witness());
            }
        }
    }

    fn finish(self, extra: Value) -> (bool, Value) {
        let mut w = json!({ "cases": self.cases, "failures": self.total_failures });
        if !self.failures.is_empty() {
            w["first_failures"] = Value::Array(self.failures);
        }
        if let (Value::Object(m), Value::Object(e)) = (&mut w, extra) {
            m.extend(e);
        }
        (self.total_failures == 0, w)
    }
}

fn text(c: &Circuit) -> String {
    c.to_text().unwrap_or_else(|_| format!("{c:?}"))
}

fn exact(c: &Circuit) -> Result<Matrix<E>> {
    build_unitary(c)
}

fn s_value<S: Scalar>(u: &Matrix<S>) -> Result<u64> {
    Ok(compute_s_unitary(u)?.s)
}

fn nullity<S: Scalar>(u: &Matrix<S>) -> Result<u32> {
    Ok(compute_s_unitary(u)?.nullity)
}

fn random_ct<R: Rng>(n: usize, rng: &mut R) -> Circuit {
    random_clifford_t(n, 4 * n + 6, rng)
}

fn log2(s: u64) -> u32 {
    s.trailing_zeros()
}

// ---------------------------------------------------------------------------
// f(q, s, p)

fn bits_to_mask(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |m, &b| (m << 1) | b as u64)
}

fn check_lengths(q: &[bool], s: &[bool], p: &[bool]) -> Result<usize> {
    if q.len() != s.len() {
        return Err(Error::LengthMismatch(q.len(), s.len()));
    }
    if q.len() != p.len() {
        return Err(Error::LengthMismatch(q.len(), p.len()));
    }
    if q.is_empty() || q.len() > 30 {
        return Err(Error::InvalidLabel(format!("bit strings of length {}", q.len())));
    }
    Ok(q.len())
}

fn parity(x: u64) -> i64 {
    if x.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn f_closed_masks(n: usize, q: u64, s: u64, p: u64) -> i64 {
    let full = 1i64 << n;
    let ones = (1u64 << n) - 1;
    let a = q ^ s;
    match (p == 0, a == 0) {
        (true, true) => full,
        (true, false) => 0,
        (false, true) => full - 4,
        (false, false) => -2 * parity(a & ones) - 2 * parity(a & (ones ^ p)),
    }
}

fn f_brute_masks(n: usize, q: u64, s: u64, p: u64) -> i64 {
    let ones = (1u64 << n) - 1;
    let a = q ^ s;
    let odot = |y: u64| (y == ones) as u32;
    (0..=ones)
        .map(|y| {
            let sign = parity(a & y);
            if (odot(y) + odot(y ^ p)) % 2 == 0 {
                sign
            } else {
                -sign
            }
        })
        .sum()
}

/// Closed form of `f(q, s, p) = Σ_y (−1)^{(q⊕s)·y} (−1)^{⊙(y) + ⊙(y⊕p)}`,
/// where `⊙(y)` is the product of the bits of `y`.
pub fn f_closed_form(q: &[bool], s: &[bool], p: &[bool]) -> Result<i64> {
    let n = check_lengths(q, s, p)?;
    Ok(f_closed_masks(n, bits_to_mask(q), bits_to_mask(s), bits_to_mask(p)))
}

/// The defining 2^n-term sum of `f`.
pub fn f_brute(q: &[bool], s: &[bool], p: &[bool]) -> Result<i64> {
    let n = check_lengths(q, s, p)?;
    Ok(f_brute_masks(n, bits_to_mask(q), bits_to_mask(s), bits_to_mask(p)))
}

fn check_f_closed_form(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    let mut exhaustive = 0;
    for n in 1..=3usize {
        let top = 1u64 << n;
        for q in 0..top {
            for s in 0..top {
                for p in 0..top {
                    let (c, b) = (f_closed_masks(n, q, s, p), f_brute_masks(n, q, s, p));
                    exhaustive += 1;
                    tally.record(c == b, || json!({ "n": n, "q": q, "s": s, "p": p, "closed": c, "brute": b }));
                }
            }
        }
    }
    for n in [4usize, 5] {
        for _ in 0..params.f_random {
            let top = 1u64 << n;
            let (q, s, p) = (rng.gen_range(0..top), rng.gen_range(0..top), rng.gen_range(0..top));
            let (c, b) = (f_closed_masks(n, q, s, p), f_brute_masks(n, q, s, p));
            tally.record(c == b, || json!({ "n": n, "q": q, "s": s, "p": p, "closed": c, "brute": b }));
        }
    }
    Ok(tally.finish(json!({ "exhaustive_triples": exhaustive, "random_per_n": params.f_random })))
}

// ---------------------------------------------------------------------------
// Unitary properties

fn check_t_transfer_matrix(_: &mut ChaCha8Rng, _: Params, fault: bool) -> Result<(bool, Value)> {
    let t: Matrix<E> = GateKind::T.local_matrix()?;
    let h = E::inv_sqrt2();
    let (o, z) = (E::one(), E::zero());
    // rows u, columns v, both in the order I, X, Y, Z
    let mut want = [vec![o.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), h.clone(), -h.clone(), z.clone()],
        vec![z.clone(), h.clone(), h.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone(), o.clone()]];
    if fault {
        want[1][1] = -h.clone();
    }
    let labels: Vec<PauliLabel> = ["I", "X", "Y", "Z"].iter().map(|s| s.parse().unwrap()).collect();
    let mut tally = Tally::default();
    let mut got = Vec::new();
    for (r, a) in labels.iter().enumerate() {
        let mut row = Vec::new();
        for (c, b) in labels.iter().enumerate() {
            let v = unitary_pauli_function(&t, a, b)?;
            tally.record(v == want[r][c], || {
                json!({ "u": a, "v": b, "computed": v.to_c64().re, "expected": want[r][c].to_c64().re })
            });
            row.push(v.to_c64().re);
        }
        got.push(row);
    }
    let r = compute_s_unitary(&t)?;
    tally.record(r.s == 2 && r.nullity == 1, || json!({ "s": r.s, "nullity": r.nullity }));
    Ok(tally.finish(json!({ "matrix": got, "s": r.s, "nullity": r.nullity })))
}

/// Whether `W` equals `±σ_u` for some label, by comparison against every
/// dense Pauli.
fn is_signed_pauli_dense(w: &Matrix<E>) -> Result<bool> {
    for u in PauliLabel::all(w.n()) {
        let p: Matrix<E> = u.to_dense()?;
        let minus = PhasedPauli::new(u, 2).to_dense::<E>()?;
        if *w == p || *w == minus {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Clifford test that only conjugates the 2n generators X_q, Z_q.
fn clifford_by_generators(u: &Matrix<E>) -> Result<bool> {
    let n = u.n();
    let ud = u.adjoint();
    for q in 0..n {
        for p in ['X', 'Z'] {
            let s: Matrix<E> = PauliLabel::single(n, q, p)?.to_dense()?;
            if !is_signed_pauli_dense(&u.mul(&s)?.mul(&ud)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_faithfulness(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    let mut cliffords = 0;
    for i in 0..params.circuits {
        let n = rng.gen_range(1..=3);
        let c = if i % 3 == 0 { random_clifford(n, 10, rng) } else { random_ct(n, rng) };
        let u = exact(&c)?;
        let v = nullity(&u)?;
        let oracle = clifford_by_generators(&u)?;
        cliffords += oracle as usize;
        tally.record(v <= 2 * n as u32 && (v == 0) == oracle, || {
            json!({ "circuit": text(&c), "nullity": v, "clifford_by_generators": oracle })
        });
    }
    Ok(tally.finish(json!({ "clifford_cases": cliffords })))
}

fn check_clifford_invariance(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    for _ in 0..params.circuits {
        let n = rng.gen_range(1..=3);
        let u = random_ct(n, rng);
        let c = random_clifford(n, 12, rng);
        let s_u = s_value(&exact(&u)?)?;
        let s_cu = s_value(&exact(&u.then(&c)?)?)?;
        let s_uc = s_value(&exact(&c.then(&u)?)?)?;
        tally.record(s_u == s_cu && s_u == s_uc, || {
            json!({ "u": text(&u), "c": text(&c), "s_u": s_u, "s_cu": s_cu, "s_uc": s_uc })
        });
    }
    Ok(tally.finish(json!({})))
}

fn check_tensor_additivity(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    for _ in 0..params.circuits {
        let a = rng.gen_range(1..=3);
        let b = rng.gen_range(1..=4 - a);
        let (cu, cv) = (random_ct(a, rng), random_ct(b, rng));
        let (u, v) = (exact(&cu)?, exact(&cv)?);
        let (nu, nv) = (nullity(&u)?, nullity(&v)?);
        let nuv = nullity(&u.tensor(&v)?)?;
        tally.record(nuv == nu + nv, || {
            json!({ "u": text(&cu), "v": text(&cv), "v_u": nu, "v_v": nv, "v_tensor": nuv })
        });
    }
    Ok(tally.finish(json!({})))
}

fn random_pair(rng: &mut ChaCha8Rng) -> (Circuit, Circuit) {
    let n = rng.gen_range(1..=3);
    (random_ct(n, rng), random_ct(n, rng))
}

fn check_subadditivity(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    let mut strict = 0;
    for _ in 0..params.pairs {
        let (cu, cv) = random_pair(rng);
        let n = cu.width() as u32;
        let (u, v) = (exact(&cu)?, exact(&cv)?);
        let (su, sv) = (s_value(&u)?, s_value(&v)?);
        // UV as a matrix: V acts first
        let suv = s_value(&u.mul(&v)?)?;
        let ok = (su as u128) * (sv as u128) <= (1u128 << (2 * n)) * suv as u128;
        let (vu, vv, vuv) = (2 * n - log2(su), 2 * n - log2(sv), 2 * n - log2(suv));
        strict += (vuv < vu + vv) as usize;
        tally.record(ok && vuv <= vu + vv, || {
            json!({ "u": text(&cu), "v": text(&cv), "s_u": su, "s_v": sv, "s_uv": suv })
        });
    }
    Ok(tally.finish(json!({ "pairs": params.pairs, "strict_cases": strict })))
}

fn check_intersection_bound(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    for _ in 0..params.pairs {
        let (cu, cv) = random_pair(rng);
        let (u, v) = (exact(&cu)?, exact(&cv)?);
        let p_udag = subgroup_p_u(&u.adjoint())?;
        let p_v = subgroup_p_u(&v)?;
        let inter = p_udag.intersect(&p_v)?.size();
        let suv = s_value(&u.mul(&v)?)?;
        tally.record(inter <= suv as u128, || {
            json!({ "u": text(&cu), "v": text(&cv), "intersection": inter as u64, "s_uv": suv })
        });
    }
    Ok(tally.finish(json!({ "pairs": params.pairs })))
}

fn check_adjoint_congruence(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    for _ in 0..params.circuits {
        let n = rng.gen_range(1..=3);
        let c = random_ct(n, rng);
        let u = exact(&c)?;
        let (s, sd) = (s_value(&u)?, s_value(&u.adjoint())?);
        tally.record(s == sd, || json!({ "circuit": text(&c), "s": s, "s_adjoint": sd }));
    }
    Ok(tally.finish(json!({})))
}

fn random_diag_phases<R: Rng>(n: usize, rng: &mut R, eighth_roots: bool) -> Vec<Complex64> {
    (0..1usize << n)
        .map(|_| {
            let theta = if eighth_roots {
                std::f64::consts::FRAC_PI_4 * rng.gen_range(0..8) as f64
            } else {
                rng.gen_range(0.0..std::f64::consts::TAU)
            };
            Complex64::from_polar(1.0, theta)
        })
        .collect()
}

fn diag_circuit(n: usize, phases: Vec<Complex64>) -> Result<Circuit> {
    Circuit::from_gates(n, [Gate::new(GateKind::Diag(phases), (0..n).collect())?])
}

fn check_integrality(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    for i in 0..params.circuits {
        let n = rng.gen_range(1..=3);
        let c = if i % 2 == 0 {
            random_ct(n, rng)
        } else {
            let mut c = random_clifford(n, 6, rng);
            let d = diag_circuit(n, random_diag_phases(n, rng, false))?;
            c = c.then(&d)?.then(&random_clifford(n, 6, rng))?;
            c
        };
        let u = build_unitary::<Complex64>(&c)?;
        let r = compute_s_unitary(&u)?;
        tally.record(r.s.is_power_of_two() && r.nullity <= 2 * n as u32, || {
            json!({ "circuit": format!("{c}"), "s": r.s })
        });
    }
    Ok(tally.finish(json!({})))
}

fn check_state_stab_equivalence(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    for _ in 0..params.circuits {
        let n = rng.gen_range(1..=3);
        let c = random_ct(n, rng);
        let psi = crate::circuit::apply_to_state(&c, &StateVector::<E>::zero_state(n))?;
        let s = compute_s_state(&psi)?.s;
        let group = stab_group(&psi)?;
        let mut fixed = 0u64;
        for u in PauliLabel::all(n) {
            for phase in [0u8, 2] {
                let p = PhasedPauli::new(u, phase).to_dense::<E>()?;
                fixed += (p.apply(&psi)? == psi) as u64;
            }
        }
        let all_fix = group.iter().all(|g| g.to_dense::<E>().and_then(|p| p.apply(&psi)).is_ok_and(|x| x == psi));
        tally.record(group.len() as u64 == s && fixed == s && all_fix, || {
            json!({ "circuit": text(&c), "s": s, "stab_group": group.len(), "dense_fixers": fixed })
        });
    }
    Ok(tally.finish(json!({})))
}

fn random_subgroup<R: Rng>(n: usize, rng: &mut R) -> Result<LabelSubgroup> {
    let k = rng.gen_range(0..=2 * n);
    let gens: Vec<_> = (0..k)
        .map(|_| PauliLabel::from_index(n, rng.gen_range(0..1u64 << (2 * n))))
        .collect::<Result<_>>()?;
    LabelSubgroup::span(n, &gens)
}

fn check_lagrange(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    for _ in 0..params.subgroups {
        let n = rng.gen_range(1..=4);
        let (a, b) = (random_subgroup(n, rng)?, random_subgroup(n, rng)?);
        let inter = a.intersect(&b)?.size();
        let prod = a.product_set_size(&b)? as u128;
        tally.record(a.size() * b.size() == inter * prod, || {
            json!({
                "n": n,
                "a": a.generators(),
                "b": b.generators(),
                "intersection": inter as u64,
                "product_set": prod as u64,
            })
        });
    }
    Ok(tally.finish(json!({ "pairs": params.subgroups })))
}

fn check_nonzero_pattern(rng: &mut ChaCha8Rng, _: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    for _ in 0..100 {
        let n = rng.gen_range(1..=4);
        let u = PauliLabel::from_index(n, rng.gen_range(0..1u64 << (2 * n)))?;
        let dense: Matrix<Complex64> = u.to_dense()?;
        let x_part: Matrix<Complex64> = PauliLabel::new(n, u.x_mask(), 0)?.to_dense()?;
        let magnitudes = Matrix::from_fn(n, |r, c| Complex64::new(dense.get(r, c).norm(), 0.0));
        tally.record(magnitudes.approx_eq(&x_part), || json!({ "label": u }));
    }
    Ok(tally.finish(json!({})))
}

fn check_fixed_v_uniqueness(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    for _ in 0..params.circuits.min(20) {
        let n = rng.gen_range(1..=2);
        let c = random_ct(n, rng);
        let u = exact(&c)?;
        for v in PauliLabel::all(n) {
            let mut units = Vec::new();
            for a in PauliLabel::all(n) {
                if let Some(sign) = unitary_pauli_function(&u, &a, &v)?.sign_if_unit() {
                    units.push((a, sign));
                }
            }
            let detected = conjugate_and_detect(&u, &v);
            let ok = units.len() <= 1 && units.first().copied() == detected;
            tally.record(ok, || {
                json!({ "circuit": text(&c), "v": v, "trace_units": units.len(), "detected": detected.map(|d| d.0) })
            });
        }
    }
    Ok(tally.finish(json!({})))
}

// ---------------------------------------------------------------------------
// States versus unitaries

fn check_diagonal_equality(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut cases: Vec<(String, Circuit)> = vec![
        ("ccz".into(), "qubits 3\nccz 0 1 2\n".parse()?),
        ("t⊗t".into(), "qubits 2\nt 0\nt 1\n".parse()?),
    ];
    for _ in 0..(params.circuits / 10).max(2) {
        let n = rng.gen_range(1..=3);
        cases.push(("random diag".into(), diag_circuit(n, random_diag_phases(n, rng, true))?));
    }
    let sets: Vec<_> = (1..=3).map(enumerate_stabilizer_states::<E>).collect::<Result<_>>()?;
    let mut tally = Tally::default();
    let mut rows = Vec::new();
    for (name, c) in &cases {
        let n = c.width();
        let u = exact(c)?;
        let v = nullity(&u)?;
        let set = &sets[n - 1];
        let m = max_state_nullity(&u, set)?;
        let plus = plus_state_index(set).ok_or_else(|| Error::Integrity("|+⟩ not enumerated".into()))?;
        let at_plus = state_nullities(&u, &set.states()[plus..=plus])?[0];
        rows.push(json!({ "case": name, "n": n, "v": v, "state_max": m.max, "at_plus": at_plus }));
        tally.record(m.max == v && at_plus == v, || json!({ "circuit": format!("{c}"), "v": v, "state_max": m.max }));
    }
    Ok(tally.finish(json!({ "rows": rows })))
}

/// The 7-T CCZ expansion with the gates touching one qubit removed, for each qubit.
pub fn ccz_marginals() -> Vec<Circuit> {
    (0..3)
        .map(|drop| {
            let keep: Vec<usize> = (0..3).filter(|&q| q != drop).collect();
            let gates = ccz_clifford_t(0, 1, 2).into_iter().filter(|g| g.qubits().iter().all(|q| *q != drop)).map(
                |g| {
                    let qs = g.qubits().iter().map(|q| keep.iter().position(|k| k == q).unwrap()).collect();
                    Gate::new(g.kind().clone(), qs).expect("relabelled gate")
                },
            );
            Circuit::from_gates(2, gates).expect("two qubits")
        })
        .collect()
}

fn small_corpus(rng: &mut ChaCha8Rng, random: usize) -> Result<Vec<Circuit>> {
    let mut corpus: Vec<Circuit> =
        vec!["qubits 1\nt 0\n".parse()?, "qubits 1\nt 0\ns 0\n".parse()?, "qubits 2\nh 0\ncnot 0 1\n".parse()?];
    corpus.extend(ccz_marginals());
    for _ in 0..random {
        let n = rng.gen_range(1..=2);
        corpus.push(random_ct(n, rng));
    }
    Ok(corpus)
}

fn check_aux_attainment(rng: &mut ChaCha8Rng, _: Params, _: bool) -> Result<(bool, Value)> {
    let corpus = small_corpus(rng, 50)?;
    let mut tally = Tally::default();
    for c in &corpus {
        let u = exact(c)?;
        let v = nullity(&u)?;
        let aux = aux_nullity(&u, &maximally_entangled(c.width())?)?;
        tally.record(aux == v, || json!({ "circuit": text(c), "v": v, "aux": aux }));
    }
    Ok(tally.finish(json!({ "corpus": corpus.len() })))
}

fn check_comparison_domination(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let corpus = small_corpus(rng, params.circuits / 5)?;
    let mut tally = Tally::default();
    let mut ancillas = 0;
    for c in &corpus {
        let n = c.width();
        let u = exact(c)?;
        let v = nullity(&u)?;
        for d in 0..=n {
            let pool = ancilla_pool::<E, _>(d + n, n, params.ancillas, rng)?;
            ancillas += pool.len();
            let best = pool.par_iter().map(|p| aux_nullity(&u, p)).collect::<Result<Vec<_>>>()?;
            let best = best.into_iter().max().unwrap_or(0);
            tally.record(best <= v, || json!({ "circuit": text(c), "d": d, "v": v, "best_aux": best }));
        }
    }
    Ok(tally.finish(json!({ "ancillas": ancillas })))
}

fn check_padding(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    let mut rows = Vec::new();
    let t: Matrix<E> = GateKind::T.local_matrix()?;
    let h: Matrix<E> = GateKind::H.local_matrix()?;
    for (name, u, d, dp) in [("t", &t, 1, 0), ("t", &t, 2, 1), ("h", &h, 1, 0)] {
        let r = padding_monotonicity_check(u, d, dp, params.ancillas, rng)?;
        rows.push(json!({ "u": name, "report": r }));
        tally.record(r.holds, || json!({ "u": name, "report": r }));
    }
    if params.deep {
        let u = build_unitary::<Complex64>(&special_family(3))?;
        let r = padding_monotonicity_check(&u, 3, 0, params.ancillas, rng)?;
        rows.push(json!({ "u": "special_family(3)", "report": r }));
        tally.record(r.holds && r.best_d == 6 && r.best_d_prime <= 3, || json!({ "report": r }));
    }
    Ok(tally.finish(json!({ "runs": rows })))
}

// ---------------------------------------------------------------------------
// The 2n family and the counterexamples

/// `X^x Z^z` as a phased Pauli.
fn xz_product(n: usize, x: u64, z: u64) -> Result<PhasedPauli> {
    let label = PauliLabel::new(n, x, z)?;
    Ok(PhasedPauli::new(label, ((4 - label.y_count() % 4) % 4) as u8))
}

pub fn theorem_2n_check(n: usize, seed: u64) -> CheckResult {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, "theorem_2n"));
    let (passed, witness) = theorem_2n_inner(n, &mut rng).unwrap_or_else(|e| (false, json!({ "error": e.to_string() })));
    CheckResult {
        name: format!("theorem_2n({n})"),
        passed,
        seed,
        scale: Scale::Standard,
        witness,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn theorem_2n_inner(n: usize, rng: &mut ChaCha8Rng) -> Result<(bool, Value)> {
    if !(3..=5).contains(&n) {
        return Err(Error::InvalidGate(format!("theorem_2n_check needs 3 ≤ n ≤ 5, got {n}")));
    }
    let u = exact(&special_family(n))?;
    let report = compute_s_unitary(&u)?;
    let p_u = subgroup_p_u(&u)?;
    let mut tally = Tally::default();
    tally.record(report.s == 1 && report.nullity == 2 * n as u32 && p_u.size() == 1, || {
        json!({ "s": report.s, "nullity": report.nullity })
    });

    let ud = u.adjoint();
    let top = 1u64 << n;
    let scale = E::inv_sqrt2_pow(2 * n as u32);
    for _ in 0..50 {
        let (s, t, p, q) = (rng.gen_range(0..top), rng.gen_range(0..top), rng.gen_range(0..top), rng.gen_range(0..top));
        let su: Matrix<E> = xz_product(n, s, t)?.to_dense()?;
        let sv: Matrix<E> = xz_product(n, p, q)?.to_dense()?;
        let direct = su.mul(&u)?.mul(&sv)?.mul(&ud)?.trace();
        let sign = parity(s & p) * parity(s & t);
        let factored = sign * f_closed_masks(n, p, t, s) * f_closed_masks(n, q, s, p);
        let factored_s = E::from_i64(factored).mul_ref(&scale);
        tally.record(direct == factored_s, || {
            json!({ "s": s, "t": t, "p": p, "q": q, "direct": direct.to_c64().re, "factored": factored_s.to_c64().re })
        });
    }
    Ok(tally.finish(json!({ "n": n, "s": report.s, "nullity": report.nullity, "trace_pairs": 50 })))
}

fn check_theorem_2n(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    let mut rows = Vec::new();
    let ns: &[usize] = if params.deep { &[3, 4, 5] } else { &[3, 4] };
    for &n in ns {
        let (ok, w) = theorem_2n_inner(n, rng)?;
        tally.record(ok, || w.clone());
        rows.push(w);
    }
    let v1 = nullity(&exact(&special_family(1))?)?;
    tally.record(v1 == 0, || json!({ "n": 1, "nullity": v1 }));
    Ok(tally.finish(json!({ "runs": rows, "n1_nullity": v1 })))
}

fn check_strict_separation(_: &mut ChaCha8Rng, _: Params, _: bool) -> Result<(bool, Value)> {
    let u = exact(&special_family(3))?;
    let v = nullity(&u)?;
    let set = enumerate_stabilizer_states::<E>(3)?;
    let m = max_state_nullity(&u, &set)?;
    let aux = aux_nullity(&u, &maximally_entangled(3)?)?;
    let ok = m.max <= 3 && m.max < v && v == 6 && aux == v;
    Ok((ok, json!({ "v": v, "state_max": m.max, "states": set.len(), "aux_phi": aux })))
}

/// Results `(v_s(U|ψ⟩), v_s(V|ψ⟩), v_s(UV|ψ⟩))` and `(v(U), v(V), v(UV))`
/// for `ψ = C|0⟩`, `U = e^{iX} H C⁻¹`, `V = C H C⁻¹`.
pub fn counterexample_values(c: &Circuit) -> Result<([u32; 3], [u32; 3])> {
    let cm = build_unitary::<Complex64>(c)?;
    let cinv = cm.adjoint();
    let h: Matrix<Complex64> = GateKind::H.local_matrix()?;
    let e: Matrix<Complex64> = exp_ix(0).kind().local_matrix()?;
    let u = e.mul(&h)?.mul(&cinv)?;
    let v = cm.mul(&h)?.mul(&cinv)?;
    let uv = u.mul(&v)?;
    let psi = cm.apply(&StateVector::zero_state(1))?;
    let states = [
        compute_s_state(&u.apply(&psi)?)?.nullity,
        compute_s_state(&v.apply(&psi)?)?.nullity,
        compute_s_state(&uv.apply(&psi)?)?.nullity,
    ];
    let unitaries = [nullity(&u)?, nullity(&v)?, nullity(&uv)?];
    Ok((states, unitaries))
}

fn check_state_counterexample(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut cs: Vec<(String, Circuit)> = vec![
        ("I".into(), "qubits 1\n".parse()?),
        ("H".into(), "qubits 1\nh 0\n".parse()?),
    ];
    for _ in 0..(params.circuits / 4) {
        let c = random_clifford(1, 8, rng);
        cs.push((text(&c), c));
    }
    let mut tally = Tally::default();
    let mut rows = Vec::new();
    for (name, c) in &cs {
        let (st, un) = counterexample_values(c)?;
        rows.push(json!({ "c": name, "states": st, "unitaries": un }));
        tally.record(st == [0, 0, 1] && un[2] <= un[0] + un[1], || json!({ "c": name, "states": st, "unitaries": un }));
    }
    Ok(tally.finish(json!({ "runs": rows })))
}

/// `(M ⊗ I)|Φ⟩` against `(I ⊗ Mᵀ)|Φ⟩`.
pub fn transpose_trick_check<S: Scalar>(m: &Matrix<S>) -> CheckResult {
    let start = Instant::now();
    let (passed, witness) = transpose_inner(m).unwrap_or_else(|e| (false, json!({ "error": e.to_string() })));
    CheckResult {
        name: "transpose_trick".into(),
        passed,
        seed: 0,
        scale: Scale::Standard,
        witness,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn transpose_inner<S: Scalar>(m: &Matrix<S>) -> Result<(bool, Value)> {
    let n = m.n();
    let phi = maximally_entangled::<S>(n)?;
    let id = Matrix::<S>::identity(n);
    let left = m.tensor(&id)?.apply(&phi)?;
    let right = id.tensor(&m.transpose())?.apply(&phi)?;
    let untransposed = id.tensor(m)?.apply(&phi)?;
    let ok = left.approx_eq(&right);
    let symmetric = left.approx_eq(&untransposed);
    let amps = |s: &StateVector<S>| s.amplitudes().iter().map(|a| a.to_c64()).map(|c| [c.re, c.im]).collect::<Vec<_>>();
    Ok((ok, json!({ "n": n, "left": amps(&left), "right": amps(&right), "equal_without_transpose": symmetric })))
}

fn check_transpose_trick(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let mut tally = Tally::default();
    let mut ms: Vec<Matrix<E>> = vec![GateKind::X.local_matrix()?, GateKind::T.local_matrix()?];
    for _ in 0..(params.circuits / 4).max(2) {
        let n = rng.gen_range(1..=2);
        ms.push(exact(&random_ct(n, rng))?);
    }
    for m in &ms {
        let r = transpose_trick_check(m);
        tally.record(r.passed, || r.witness.clone());
    }
    Ok(tally.finish(json!({ "matrices": ms.len() })))
}

// ---------------------------------------------------------------------------
// Bounds and backends

fn clifford_t_corpus(rng: &mut ChaCha8Rng, random: usize, max_n: usize) -> Result<Vec<Circuit>> {
    let mut corpus: Vec<Circuit> = vec![
        "qubits 1\nt 0\n".parse()?,
        "qubits 1\nt 0\ns 0\n".parse()?,
        "qubits 2\nh 0\ncnot 0 1\n".parse()?,
        toffoli_clifford_t(),
        special_family_clifford_t(),
        Circuit::from_gates(3, ccz_clifford_t(0, 1, 2))?.with_name("ccz_7t"),
    ];
    corpus.extend(ccz_marginals());
    for _ in 0..random {
        let n = rng.gen_range(1..=max_n);
        corpus.push(random_ct(n, rng));
    }
    Ok(corpus)
}

fn check_soundness(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let corpus = clifford_t_corpus(rng, params.circuits, 3)?;
    let mut tally = Tally::default();
    for c in &corpus {
        match t_count_lower_bound::<E>(c) {
            Ok(b) => tally.record(b.bound as usize <= b.t_gates_used, || json!({ "circuit": text(c) })),
            Err(e) => tally.record(false, || json!({ "circuit": text(c), "error": e.to_string() })),
        }
    }
    let tof = t_count_lower_bound::<E>(&toffoli_clifford_t())?;
    tally.record(tof.bound == 3 && tof.t_gates_used == 7, || json!({ "toffoli_bound": tof.bound }));
    Ok(tally.finish(json!({ "corpus": corpus.len(), "toffoli_bound": tof.bound, "toffoli_t_gates": tof.t_gates_used })))
}

fn check_backend_agreement(rng: &mut ChaCha8Rng, params: Params, _: bool) -> Result<(bool, Value)> {
    let corpus = clifford_t_corpus(rng, params.circuits, 4)?;
    let mut tally = Tally::default();
    for c in &corpus {
        let se = s_value(&exact(c)?)?;
        let sf = s_value(&build_unitary::<Complex64>(c)?)?;
        tally.record(se == sf, || json!({ "circuit": text(c), "exact": se, "float": sf }));
    }
    Ok(tally.finish(json!({ "corpus": corpus.len() })))
}
