//! Dense 2^n × 2^n matrices and 2^n state vectors over any [`Scalar`].
//!
//! Basis state `|b_0 b_1 … b_{n-1}⟩` has index `Σ b_q 2^{n-1-q}`, so qubit 0
//! is the most significant bit and `A.tensor(B)` puts `A` on the leading
//! qubits.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Allocation guard for any dense matrix (2^14 × 2^14 entries).
pub const MAX_DENSE_QUBITS: usize = 14;

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

fn guard(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        Err(Error::CapExceeded { what: "dense matrix", n, cap: MAX_DENSE_QUBITS })
    } else {
        Ok(())
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(n: usize) -> Self {
        let dim = 1usize << n;
        Matrix { n, data: vec![S::zero(); dim * dim] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for k in 0..m.dim() {
            m.set(k, k, S::one());
        }
        m
    }

    /// Row-major entries.
    pub fn from_rows(n: usize, data: Vec<S>) -> Result<Self> {
        guard(n)?;
        let dim = 1usize << n;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: data.len() });
        }
        Ok(Matrix { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let dim = 1usize << n;
        let data = (0..dim * dim).map(|i| f(i / dim, i % dim)).collect();
        Matrix { n, data }
    }

    pub fn diagonal(entries: Vec<S>) -> Result<Self> {
        let n = entries.len().trailing_zeros() as usize;
        if entries.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: entries.len() });
        }
        let mut m = Self::zeros(n);
        for (k, e) in entries.into_iter().enumerate() {
            m.set(k, k, e);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.data[row * self.dim() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: S) {
        let d = self.dim();
        self.data[row * d + col] = v;
    }

    pub fn row(&self, row: usize) -> &[S] {
        let d = self.dim();
        &self.data[row * d..(row + 1) * d]
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut Vec<S> {
        &mut self.data
    }

    /// Matrix product. Rows are computed in parallel; each entry is summed
    /// in a fixed order, so the result does not depend on thread count.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::QubitMismatch { left: self.n, right: rhs.n });
        }
        let d = self.dim();
        let rows: Vec<Vec<S>> = (0..d)
            .into_par_iter()
            .map(|r| {
                let mut out = vec![S::zero(); d];
                for (k, a) in self.row(r).iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (c, b) in rhs.row(k).iter().enumerate() {
                        if !b.is_zero() {
                            out[c].add_assign_ref(&a.mul_ref(b));
                        }
                    }
                }
                out
            })
            .collect();
        Ok(Matrix { n: self.n, data: rows.into_iter().flatten().collect() })
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn tensor(&self, rhs: &Self) -> Result<Self> {
        let n = self.n + rhs.n;
        guard(n)?;
        let db = rhs.dim();
        Ok(Matrix::from_fn(n, |r, c| {
            self.get(r / db, c / db).mul_ref(rhs.get(r % db, c % db))
        }))
    }

    pub fn adjoint(&self) -> Self {
        Matrix::from_fn(self.n, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.n, |r, c| self.get(c, r).clone())
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for k in 0..self.dim() {
            t.add_assign_ref(self.get(k, k));
        }
        t
    }

    pub fn apply(&self, v: &StateVector<S>) -> Result<StateVector<S>> {
        if self.n != v.n {
            return Err(Error::QubitMismatch { left: self.n, right: v.n });
        }
        let amps = (0..self.dim())
            .map(|r| {
                let mut acc = S::zero();
                for (a, b) in self.row(r).iter().zip(&v.amps) {
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_assign_ref(&a.mul_ref(b));
                    }
                }
                acc
            })
            .collect();
        Ok(StateVector { n: self.n, amps })
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.n == other.n && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b))
    }

    pub fn is_unitary(&self) -> bool {
        match self.adjoint().mul(self) {
            Ok(p) => p.approx_eq(&Matrix::identity(self.n)),
            Err(_) => false,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|r| (0..d).all(|c| r == c || self.get(r, c).is_negligible()))
    }

    pub fn to_float(&self) -> Matrix<Complex<f64>> {
        Matrix { n: self.n, data: self.data.iter().map(Scalar::to_c64).collect() }
    }

    /// Largest entrywise modulus of `self - other`, in `f64`.
    pub fn max_norm_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.to_c64() - b.to_c64()).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct StateVector<S> {
    n: usize,
    amps: Vec<S>,
}

impl<S: Scalar> StateVector<S> {
    pub fn from_amplitudes(n: usize, amps: Vec<S>) -> Result<Self> {
        guard(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: amps.len() });
        }
        Ok(StateVector { n, amps })
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![S::zero(); 1 << n];
        amps[index] = S::one();
        StateVector { n, amps }
    }

    /// |0…0⟩
    pub fn zero_state(n: usize) -> Self {
        Self::basis(n, 0)
    }

    /// |+⟩^{⊗n}
    pub fn plus_state(n: usize) -> Self {
        let a = S::inv_sqrt2_pow(n as u32);
        StateVector { n, amps: vec![a; 1 << n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[S] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut Vec<S> {
        &mut self.amps
    }

    pub fn inner(&self, other: &Self) -> Result<S> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        let mut acc = S::zero();
        for (a, b) in self.amps.iter().zip(&other.amps) {
            acc.add_assign_ref(&a.conj().mul_ref(b));
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> S {
        self.inner(self).expect("same state")
    }

    pub fn is_normalized(&self) -> bool {
        self.norm_sqr().approx_eq(&S::one())
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        guard(n)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a.mul_ref(b)))
            .collect();
        Ok(StateVector { n, amps })
    }

    pub fn scale(&self, s: &S) -> Self {
        StateVector { n: self.n, amps: self.amps.iter().map(|a| a.mul_ref(s)).collect() }
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.n == other.n && self.amps.iter().zip(&other.amps).all(|(a, b)| a.approx_eq(b))
    }

    /// Multiplies by a global phase so the first nonzero amplitude is real
    /// and positive. Returns `None` for the zero vector or when the backend
    /// cannot represent the rotation.
    pub fn phase_canonical(&self) -> Option<Self> {
        let first = self.amps.iter().find(|a| !a.is_negligible())?;
        let u = first.align_phase()?;
        Some(self.scale(&u))
    }

    pub fn to_float(&self) -> StateVector<Complex<f64>> {
        StateVector { n: self.n, amps: self.amps.iter().map(Scalar::to_c64).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliLabel;
    use crate::scalar::ExactScalar;
    use num_complex::Complex64;
    use num_traits::One;

    type E = ExactScalar;

    fn hadamard<S: Scalar>() -> Matrix<S> {
        let h = S::inv_sqrt2();
        Matrix::from_rows(1, vec![h.clone(), h.clone(), h.clone(), -h]).unwrap()
    }

    fn t_gate<S: Scalar>() -> Matrix<S> {
        Matrix::diagonal(vec![S::one(), S::omega()]).unwrap()
    }

    #[test]
    fn hadamard_squares_to_identity_exactly() {
        let h = hadamard::<E>();
        assert_eq!(h.mul(&h).unwrap(), Matrix::identity(1));
    }

    #[test]
    fn t_squared_is_s() {
        let t = t_gate::<E>();
        let s = Matrix::diagonal(vec![E::one(), E::i()]).unwrap();
        assert_eq!(t.mul(&t).unwrap(), s);
    }

    #[test]
    fn tensor_examples() {
        let i2 = Matrix::<E>::identity(1);
        assert_eq!(i2.tensor(&i2).unwrap(), Matrix::identity(2));
        let x: Matrix<E> = "X".parse::<PauliLabel>().unwrap().to_dense().unwrap();
        let z: Matrix<E> = "Z".parse::<PauliLabel>().unwrap().to_dense().unwrap();
        let xz: Matrix<E> = "XZ".parse::<PauliLabel>().unwrap().to_dense().unwrap();
        assert_eq!(x.tensor(&z).unwrap(), xz);
    }

    #[test]
    fn adjoint_of_t() {
        let td = t_gate::<E>().adjoint();
        assert_eq!(td.get(1, 1), &E::from_ints([0, 0, 0, -1], 0));
        assert_eq!(td.get(0, 0), &E::one());
    }

    #[test]
    fn trace_of_identity() {
        for n in 0..4 {
            assert_eq!(Matrix::<E>::identity(n).trace(), E::from_i64(1 << n));
        }
    }

    #[test]
    fn apply_hadamard_to_zero() {
        let plus = hadamard::<E>().apply(&StateVector::zero_state(1)).unwrap();
        assert_eq!(plus, StateVector::plus_state(1));
    }

    #[test]
    fn mismatches_are_errors() {
        let a = Matrix::<Complex64>::identity(1);
        let b = Matrix::<Complex64>::identity(2);
        assert!(a.mul(&b).is_err());
        assert!(a.apply(&StateVector::zero_state(2)).is_err());
        assert!(Matrix::<Complex64>::from_rows(1, vec![Complex64::new(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn phase_canonical_exact() {
        let s = StateVector::<E>::plus_state(2).scale(&E::omega_pow(3));
        let c = s.phase_canonical().unwrap();
        assert_eq!(c, StateVector::plus_state(2));
    }

    #[test]
    fn float_and_exact_gates_agree() {
        assert!(hadamard::<E>().to_float().max_norm_diff(&hadamard::<Complex64>()) <= 1e-12);
        assert!(t_gate::<E>().to_float().max_norm_diff(&t_gate::<Complex64>()) <= 1e-12);
        assert!(t_gate::<Complex64>().is_unitary());
        assert!(hadamard::<E>().is_unitary());
    }
}
