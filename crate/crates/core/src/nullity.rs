//! Stabilizer nullity of states and unitaries.
//!
//! For a unitary `U` on n qubits, `s(U)` counts the ±1 entries of its Pauli
//! transfer matrix `P_U(u|v) = tr(σ_u U σ_v U†) / 2^n`, and the nullity is
//! `v(U) = 2n − log₂ s(U)`. An entry is ±1 exactly when `U σ_v U† = ±σ_u`,
//! so `s(U)` is computed one column `v` at a time by conjugating and testing
//! whether the result is a signed Pauli. For states, `s(|ψ⟩)` counts the
//! labels with `⟨ψ|σ_u|ψ⟩ = ±1` and `v_s = n − log₂ s`.

use std::collections::HashSet;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{build_unitary_capped, Circuit, DEFAULT_MAX_UNITARY_QUBITS};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, StateVector};
use crate::pauli::{LabelSubgroup, PauliLabel, PhasedPauli};
use crate::scalar::{Backend, ExactScalar, Scalar};

/// Largest accepted imaginary part of a Pauli function value.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// A certified ±1 entry: `U σ_v U† = sign · σ_u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransferEntry {
    pub u: PauliLabel,
    pub v: PauliLabel,
    pub sign: i8,
}

/// One certified entry of a report. State reports leave `v` empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub u: PauliLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<PauliLabel>,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullityReport {
    pub n: usize,
    pub s: u64,
    pub nullity: u32,
    pub backend: Backend,
    pub entries: Vec<ReportEntry>,
    pub elapsed_ms: f64,
}

impl NullityReport {
    pub fn is_state(&self) -> bool {
        self.entries.first().is_some_and(|e| e.v.is_none())
    }

    pub fn transfer_entries(&self) -> Vec<TransferEntry> {
        self.entries
            .iter()
            .filter_map(|e| e.v.map(|v| TransferEntry { u: e.u, v, sign: e.sign }))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn check_qubits(left: usize, right: usize) -> Result<()> {
    if left != right {
        Err(Error::QubitMismatch { left, right })
    } else {
        Ok(())
    }
}

/// Real part of a Pauli function value; fails if the imaginary part is
/// not negligible.
pub fn real_value<S: Scalar>(v: &S) -> Result<f64> {
    let c = v.to_c64();
    if c.im.abs() >= IMAGINARY_TOLERANCE {
        return Err(Error::ImaginaryPart(c.im));
    }
    Ok(c.re)
}

/// `⟨ψ|σ_u|ψ⟩`, in the state's backend.
pub fn state_pauli_function<S: Scalar>(psi: &StateVector<S>, u: &PauliLabel) -> Result<S> {
    check_qubits(psi.n(), u.n())?;
    let amps = psi.amplitudes();
    let mut acc = S::zero();
    for (col, a) in amps.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let row = col ^ u.x_mask() as usize;
        let b = &amps[row];
        if b.is_zero() {
            continue;
        }
        let k = u.y_count() + 2 * (u.z_mask() & col as u64).count_ones();
        acc.add_assign_ref(&b.conj().mul_ref(&S::i_pow(k)).mul_ref(a));
    }
    Ok(acc)
}

/// `σ_v U†` followed by `U ·`, giving `W = U σ_v U†` one row at a time.
struct Conjugation<'a, S> {
    u: &'a Matrix<S>,
    /// `(σ_v U†)[k][c] = phase_k · conj(U[c][k ⊕ x_v])`
    phases: Vec<S>,
    x: usize,
}

impl<'a, S: Scalar> Conjugation<'a, S> {
    fn new(u: &'a Matrix<S>, v: &PauliLabel) -> Self {
        let phases = (0..u.dim()).map(|k| v.entry::<S>(k).1).collect();
        Conjugation { u, phases, x: v.x_mask() as usize }
    }

    fn row(&self, r: usize) -> Vec<S> {
        let d = self.u.dim();
        let urow = self.u.row(r);
        (0..d)
            .map(|c| {
                let crow = self.u.row(c);
                let mut acc = S::zero();
                for (k, a) in urow.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let b = &crow[k ^ self.x];
                    if b.is_zero() {
                        continue;
                    }
                    acc.add_assign_ref(&a.mul_ref(&self.phases[k]).mul_ref(&b.conj()));
                }
                acc
            })
            .collect()
    }
}

/// The single non-negligible column of a row, if there is exactly one.
fn single_support<S: Scalar>(row: &[S]) -> Option<usize> {
    let mut found = None;
    for (c, v) in row.iter().enumerate() {
        if !v.is_negligible() {
            if found.is_some() {
                return None;
            }
            found = Some(c);
        }
    }
    found
}

/// Tests whether `U σ_v U†` equals `±σ_u` for some label `u`.
///
/// The candidate is read off the nonzero pattern: row 0 fixes the X mask,
/// rows `2^j` fix each Z bit against row 0, and the row-0 value fixes the
/// sign. The candidate is then checked against every entry.
pub fn conjugate_and_detect<S: Scalar>(u: &Matrix<S>, v: &PauliLabel) -> Option<(PauliLabel, i8)> {
    let n = u.n();
    if v.n() != n {
        return None;
    }
    let conj = Conjugation::new(u, v);
    let row0 = conj.row(0);
    let x = single_support(&row0)?;
    let w0 = &row0[x];

    let mut z = 0u64;
    let mut cached = vec![(0usize, row0.clone())];
    for j in 0..n {
        let r = 1usize << j;
        let row = conj.row(r);
        let c = single_support(&row)?;
        if c != r ^ x {
            return None;
        }
        // ⟨r|σ_u|r⊕x⟩ / ⟨0|σ_u|x⟩ = (−1)^{z_j}
        if row[c].approx_eq(&-w0.clone()) {
            z |= 1 << j;
        } else if !row[c].approx_eq(w0) {
            return None;
        }
        cached.push((r, row));
    }
    let label = PauliLabel::new(n, x as u64, z).ok()?;
    let (_, base) = label.entry::<S>(0);
    let sign = if w0.approx_eq(&base) {
        1i8
    } else if w0.approx_eq(&-base) {
        -1
    } else {
        return None;
    };
    let sign_s = S::from_i64(sign as i64);

    let check_row = |r: usize, row: &[S]| {
        let (col, val) = label.entry::<S>(r);
        let want = val.mul_ref(&sign_s);
        row.iter().enumerate().all(|(c, e)| if c == col { e.approx_eq(&want) } else { e.is_negligible() })
    };
    for (r, row) in &cached {
        if !check_row(*r, row) {
            return None;
        }
    }
    for r in 1..u.dim() {
        if r.is_power_of_two() {
            continue;
        }
        if !check_row(r, &conj.row(r)) {
            return None;
        }
    }
    Some((label, sign))
}

/// `tr(σ_u U σ_v U†) / 2^n`, in the matrix's backend.
pub fn unitary_pauli_function<S: Scalar>(u: &Matrix<S>, a: &PauliLabel, b: &PauliLabel) -> Result<S> {
    check_qubits(u.n(), a.n())?;
    check_qubits(u.n(), b.n())?;
    let conj = Conjugation::new(u, b);
    let mut acc = S::zero();
    // tr(σ_a W) = Σ_r ⟨r|σ_a|r⊕x⟩ W[r⊕x][r]
    for r in 0..u.dim() {
        let (c, val) = a.entry::<S>(r);
        let w = &conj.row(c)[r];
        if !w.is_zero() {
            acc.add_assign_ref(&val.mul_ref(w));
        }
    }
    Ok(acc.mul_ref(&S::inv_sqrt2_pow(2 * u.n() as u32)))
}

fn integrity_check(n: usize, labels: &[PauliLabel], what: &str) -> Result<LabelSubgroup> {
    let distinct: HashSet<_> = labels.iter().collect();
    if distinct.len() != labels.len() {
        return Err(Error::Integrity(format!("{what}: repeated labels")));
    }
    let g = LabelSubgroup::span(n, labels)?;
    if g.size() != labels.len() as u128 {
        return Err(Error::Integrity(format!(
            "{what}: {} labels do not form a subgroup (span has {})",
            labels.len(),
            g.size()
        )));
    }
    Ok(g)
}

/// Scans every column `v` of the transfer matrix. Columns are processed in
/// parallel and the entries come back sorted by `v`'s index, independent of
/// thread count.
///
/// Both the `u` labels (𝒫_U) and the `v` labels (𝒫_{U†}) are checked to be
/// subgroups of the same size, which also forces `s` to be a power of two.
pub fn compute_s_unitary<S: Scalar>(u: &Matrix<S>) -> Result<NullityReport> {
    let start = Instant::now();
    let n = u.n();
    let total = 1u64 << (2 * n);
    let hits: Vec<TransferEntry> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let v = PauliLabel::from_index(n, idx).expect("index in range");
            conjugate_and_detect(u, &v).map(|(p, sign)| TransferEntry { u: p, v, sign })
        })
        .collect();
    let us: Vec<_> = hits.iter().map(|e| e.u).collect();
    let vs: Vec<_> = hits.iter().map(|e| e.v).collect();
    integrity_check(n, &us, "P_U")?;
    integrity_check(n, &vs, "P_U†")?;
    let s = hits.len() as u64;
    Ok(NullityReport {
        n,
        s,
        nullity: 2 * n as u32 - s.trailing_zeros(),
        backend: S::BACKEND,
        entries: hits.into_iter().map(|e| ReportEntry { u: e.u, v: Some(e.v), sign: e.sign }).collect(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Labels with `⟨ψ|σ_u|ψ⟩ = ±1`, in index order.
fn state_hits<S: Scalar>(psi: &StateVector<S>) -> Result<Vec<(PauliLabel, i8)>> {
    if !psi.is_normalized() {
        return Err(Error::NotNormalized(psi.norm_sqr().to_c64().re));
    }
    let n = psi.n();
    let results: Vec<Result<Option<(PauliLabel, i8)>>> = (0..1u64 << (2 * n))
        .into_par_iter()
        .map(|idx| {
            let u = PauliLabel::from_index(n, idx).expect("index in range");
            let val = state_pauli_function(psi, &u)?;
            real_value(&val)?;
            Ok(val.sign_if_unit().map(|s| (u, s)))
        })
        .collect();
    results.into_iter().filter_map(Result::transpose).collect()
}

pub fn compute_s_state<S: Scalar>(psi: &StateVector<S>) -> Result<NullityReport> {
    let start = Instant::now();
    let n = psi.n();
    let hits = state_hits(psi)?;
    let labels: Vec<_> = hits.iter().map(|h| h.0).collect();
    integrity_check(n, &labels, "state Pauli support")?;
    let s = hits.len() as u64;
    Ok(NullityReport {
        n,
        s,
        nullity: n as u32 - s.trailing_zeros(),
        backend: S::BACKEND,
        entries: hits.into_iter().map(|(u, sign)| ReportEntry { u, v: None, sign }).collect(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Hermitian Pauli operators (phase `+` or `−`) that fix `ψ`.
pub fn stab_group<S: Scalar>(psi: &StateVector<S>) -> Result<Vec<PhasedPauli>> {
    Ok(state_hits(psi)?
        .into_iter()
        .map(|(u, sign)| PhasedPauli::new(u, if sign > 0 { 0 } else { 2 }))
        .collect())
}

/// `𝒫_U = U 𝒫_n U† ∩ 𝒫_n`.
pub fn subgroup_p_u<S: Scalar>(u: &Matrix<S>) -> Result<LabelSubgroup> {
    let report = compute_s_unitary(u)?;
    let us: Vec<_> = report.entries.iter().map(|e| e.u).collect();
    integrity_check(u.n(), &us, "P_U")
}

pub fn is_clifford<S: Scalar>(u: &Matrix<S>) -> Result<bool> {
    Ok(compute_s_unitary(u)?.s == 1u64 << (2 * u.n()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TCountBound {
    /// `v(U)`, a lower bound on the T-count.
    pub bound: u32,
    /// T and T† gates in the given circuit, an upper bound on the T-count.
    pub t_gates_used: usize,
    pub clifford_t: bool,
    pub report: NullityReport,
}

pub fn t_count_lower_bound<S: Scalar>(c: &Circuit) -> Result<TCountBound> {
    t_count_lower_bound_capped::<S>(c, DEFAULT_MAX_UNITARY_QUBITS)
}

/// Fails with [`Error::UnsoundBound`] if a Clifford+T circuit uses fewer T
/// gates than its nullity.
pub fn t_count_lower_bound_capped<S: Scalar>(c: &Circuit, max_qubits: usize) -> Result<TCountBound> {
    let u = build_unitary_capped::<S>(c, max_qubits)?;
    let report = compute_s_unitary(&u)?;
    let t_gates_used = c.count_t_gates();
    let clifford_t = c.is_clifford_t();
    if clifford_t && report.nullity as usize > t_gates_used {
        return Err(Error::UnsoundBound { bound: report.nullity, t_gates: t_gates_used });
    }
    Ok(TCountBound { bound: report.nullity, t_gates_used, clifford_t, report })
}

/// Backend dispatch for [`t_count_lower_bound_capped`].
pub fn t_count_lower_bound_with(c: &Circuit, backend: Backend, max_qubits: usize) -> Result<TCountBound> {
    match backend {
        Backend::Exact => t_count_lower_bound_capped::<ExactScalar>(c, max_qubits),
        Backend::Float => t_count_lower_bound_capped::<Complex64>(c, max_qubits),
        Backend::Float32 => t_count_lower_bound_capped::<num_complex::Complex32>(c, max_qubits),
    }
}

/// `⌈v(U) / v(W)⌉`, the number of `W` gates needed to build `U` with
/// Cliffords. `U` and `W` may act on different numbers of qubits.
pub fn gate_synthesis_lower_bound<S: Scalar>(u: &Matrix<S>, w: &Matrix<S>) -> Result<u32> {
    let vu = compute_s_unitary(u)?.nullity;
    let vw = compute_s_unitary(w)?.nullity;
    if vw == 0 {
        return Err(Error::CliffordDivisor);
    }
    Ok(vu.div_ceil(vw))
}
