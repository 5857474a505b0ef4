//! Pauli operators as pairs of bit masks.
//!
//! A label on `n` qubits stores an X mask and a Z mask. Qubit 0 is the most
//! significant bit, matching the text form (`"XZI"` has X on qubit 0) and
//! the basis-state ordering of [`Matrix`](crate::matrix::Matrix).
//!
//! The operator named by a label is the Hermitian tensor product of
//! I, X, Y, Z, which equals `i^{|x∧z|} X^x Z^z`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Largest qubit count a label can carry (masks are `u64`, subgroup
/// vectors pack both masks into one `u64`).
pub const MAX_LABEL_QUBITS: usize = 32;

/// Dense materialization guard for Pauli matrices.
pub const MAX_DENSE_PAULI_QUBITS: usize = 14;

/// Subgroups are only enumerated element by element up to this many qubits.
pub const MAX_ENUM_QUBITS: usize = 6;

/// An element of the Pauli group modulo phases.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliLabel {
    n: u8,
    x: u64,
    z: u64,
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliLabel {
    pub fn new(n: usize, x_mask: u64, z_mask: u64) -> Result<Self> {
        if n == 0 || n > MAX_LABEL_QUBITS {
            return Err(Error::InvalidLabel(format!("qubit count {n} out of range")));
        }
        let m = full_mask(n);
        if x_mask & !m != 0 || z_mask & !m != 0 {
            return Err(Error::InvalidLabel(format!(
                "masks ({x_mask:#b}, {z_mask:#b}) exceed {n} qubits"
            )));
        }
        Ok(PauliLabel { n: n as u8, x: x_mask, z: z_mask })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, 0, 0).expect("qubit count in range")
    }

    /// A single-qubit Pauli (`'I'`, `'X'`, `'Y'` or `'Z'`) on `qubit`.
    pub fn single(n: usize, qubit: usize, p: char) -> Result<Self> {
        if qubit >= n {
            return Err(Error::InvalidLabel(format!("qubit {qubit} out of range for {n}")));
        }
        let bit = 1u64 << (n - 1 - qubit);
        let (x, z) = match p {
            'I' => (0, 0),
            'X' => (bit, 0),
            'Y' => (bit, bit),
            'Z' => (0, bit),
            other => return Err(Error::InvalidLabel(format!("unknown Pauli `{other}`"))),
        };
        Self::new(n, x, z)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Number of Y factors.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Product modulo phases.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n(), right: other.n() });
        }
        Ok(PauliLabel { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z })
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// The 2n-bit vector `x ‖ z`. Also the canonical ordering key.
    pub fn index(&self) -> u64 {
        (self.x << self.n) | self.z
    }

    pub fn from_index(n: usize, index: u64) -> Result<Self> {
        let m = full_mask(n);
        Self::new(n, (index >> n) & m, index & m).and_then(|p| {
            if p.index() == index {
                Ok(p)
            } else {
                Err(Error::InvalidLabel(format!("index {index} out of range for {n} qubits")))
            }
        })
    }

    /// All 4^n labels in index order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliLabel> {
        assert!((1..MAX_LABEL_QUBITS).contains(&n), "too many qubits to enumerate");
        let count = 1u64 << (2 * n);
        (0..count).map(move |i| PauliLabel::from_index(n, i).unwrap())
    }

    /// Column and value of the single nonzero entry in `row` of the dense
    /// matrix.
    pub fn entry<S: Scalar>(&self, row: usize) -> (usize, S) {
        let col = row ^ self.x as usize;
        let k = self.y_count() + 2 * (self.z & col as u64).count_ones();
        (col, S::i_pow(k))
    }

    pub fn to_dense<S: Scalar>(&self) -> Result<Matrix<S>> {
        PhasedPauli::new(*self, 0).to_dense()
    }

    fn qubit_char(&self, q: usize) -> char {
        let bit = self.n() - 1 - q;
        match ((self.x >> bit) & 1, (self.z >> bit) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n() {
            write!(f, "{}", self.qubit_char(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliLabel({self})")
    }
}

impl FromStr for PauliLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n == 0 || n > MAX_LABEL_QUBITS {
            return Err(Error::InvalidLabel(format!("`{s}` has unsupported length {n}")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for ch in s.chars() {
            x <<= 1;
            z <<= 1;
            match ch {
                'I' => {}
                'X' => x |= 1,
                'Y' => {
                    x |= 1;
                    z |= 1
                }
                'Z' => z |= 1,
                other => return Err(Error::InvalidLabel(format!("unknown Pauli `{other}` in `{s}`"))),
            }
        }
        PauliLabel::new(n, x, z)
    }
}

impl Serialize for PauliLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A Pauli operator with its phase: `i^phase_exp · σ_label`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PhasedPauli {
    pub label: PauliLabel,
    phase_exp: u8,
}

impl PhasedPauli {
    pub fn new(label: PauliLabel, phase_exp: u8) -> Self {
        PhasedPauli { label, phase_exp: phase_exp % 4 }
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    /// Exact operator product. The phase follows from commuting the Z part
    /// of `self` past the X part of `other` and re-absorbing the Y factors.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let label = self.label.compose(&other.label)?;
        let swap = (self.label.z & other.label.x).count_ones();
        let k = self.phase_exp as u32
            + other.phase_exp as u32
            + self.label.y_count()
            + other.label.y_count()
            + 2 * swap
            + 4 * 64
            - label.y_count();
        Ok(PhasedPauli::new(label, (k % 4) as u8))
    }

    pub fn to_dense<S: Scalar>(&self) -> Result<Matrix<S>> {
        let n = self.label.n();
        if n > MAX_DENSE_PAULI_QUBITS {
            return Err(Error::CapExceeded { what: "dense Pauli", n, cap: MAX_DENSE_PAULI_QUBITS });
        }
        let dim = 1usize << n;
        let phase = S::i_pow(self.phase_exp as u32);
        let mut m = Matrix::zeros(n);
        for row in 0..dim {
            let (col, v) = self.label.entry::<S>(row);
            m.set(row, col, v.mul_ref(&phase));
        }
        Ok(m)
    }
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase_exp as usize];
        write!(f, "{prefix}{}", self.label)
    }
}

impl FromStr for PhasedPauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else {
            (0, s)
        };
        Ok(PhasedPauli::new(rest.parse()?, phase))
    }
}

impl Serialize for PhasedPauli {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A subgroup of the quotient Pauli group, held as a fully reduced GF(2)
/// basis of 2n-bit vectors (one distinct leading bit per row, and no row
/// has another row's leading bit set). The reduced basis is unique, so
/// derived equality is subgroup equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabelSubgroup {
    n: usize,
    basis: Vec<u64>,
}

fn leading_bit(v: u64) -> u32 {
    63 - v.leading_zeros()
}

impl LabelSubgroup {
    pub fn trivial(n: usize) -> Self {
        LabelSubgroup { n, basis: Vec::new() }
    }

    /// The XOR closure of `gens`.
    pub fn span(n: usize, gens: &[PauliLabel]) -> Result<Self> {
        let mut g = Self::trivial(n);
        for p in gens {
            g.insert(p)?;
        }
        Ok(g)
    }

    /// All of 𝒫_n.
    pub fn full(n: usize) -> Self {
        LabelSubgroup { n, basis: (0..2 * n).rev().map(|b| 1u64 << b).collect() }
    }

    /// {I,Z}^{⊗n}
    pub fn z_type(n: usize) -> Self {
        LabelSubgroup { n, basis: (0..n).rev().map(|b| 1u64 << b).collect() }
    }

    /// {I,X}^{⊗n}
    pub fn x_type(n: usize) -> Self {
        LabelSubgroup { n, basis: (0..n).rev().map(|b| 1u64 << (b + n)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn size(&self) -> u128 {
        1u128 << self.rank()
    }

    pub fn generators(&self) -> Vec<PauliLabel> {
        self.basis.iter().map(|&v| PauliLabel::from_index(self.n, v).unwrap()).collect()
    }

    fn reduce(&self, mut v: u64) -> u64 {
        for &b in &self.basis {
            if v >> leading_bit(b) & 1 == 1 {
                v ^= b;
            }
        }
        v
    }

    fn check(&self, p: &PauliLabel) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::QubitMismatch { left: self.n, right: p.n() });
        }
        Ok(())
    }

    /// Adds a generator. Returns whether the subgroup grew.
    pub fn insert(&mut self, p: &PauliLabel) -> Result<bool> {
        self.check(p)?;
        Ok(self.insert_vec(p.index()))
    }

    fn insert_vec(&mut self, v: u64) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let lb = leading_bit(v);
        for b in &mut self.basis {
            if *b >> lb & 1 == 1 {
                *b ^= v;
            }
        }
        self.basis.push(v);
        self.basis.sort_unstable_by(|a, b| b.cmp(a));
        true
    }

    pub fn contains(&self, p: &PauliLabel) -> bool {
        p.n() == self.n && self.reduce(p.index()) == 0
    }

    /// Every element, in Gray-code order from the identity.
    pub fn elements(&self) -> Result<Vec<PauliLabel>> {
        if self.n > MAX_ENUM_QUBITS {
            return Err(Error::CapExceeded {
                what: "subgroup enumeration",
                n: self.n,
                cap: MAX_ENUM_QUBITS,
            });
        }
        let mut out = Vec::with_capacity(1 << self.rank());
        let mut v = 0u64;
        out.push(v);
        for i in 1u64..(1u64 << self.rank()) {
            v ^= self.basis[i.trailing_zeros() as usize];
            out.push(v);
        }
        Ok(out.into_iter().map(|v| PauliLabel::from_index(self.n, v).unwrap()).collect())
    }

    /// Zassenhaus intersection: row-reduce `[a | a]` and `[b | 0]`; the rows
    /// whose left half vanishes span the intersection.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        let mut rows: Vec<u128> = Vec::new();
        let push = |rows: &mut Vec<u128>, mut v: u128| {
            for &r in rows.iter() {
                let lb = 127 - r.leading_zeros();
                if v >> lb & 1 == 1 {
                    v ^= r;
                }
            }
            if v != 0 {
                rows.push(v);
                rows.sort_unstable_by(|a, b| b.cmp(a));
            }
        };
        for &a in &self.basis {
            push(&mut rows, ((a as u128) << 64) | a as u128);
        }
        for &b in &other.basis {
            push(&mut rows, (b as u128) << 64);
        }
        let mut out = Self::trivial(self.n);
        for r in rows {
            if r >> 64 == 0 {
                out.insert_vec(r as u64);
            }
        }
        Ok(out)
    }

    /// The subgroup generated by both.
    pub fn join(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        let mut out = self.clone();
        for &b in &other.basis {
            out.insert_vec(b);
        }
        Ok(out)
    }

    /// `|{a·b : a ∈ self, b ∈ other}|`, counted by enumerating every product.
    pub fn product_set_size(&self, other: &Self) -> Result<u64> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        let a = self.elements()?;
        let b = other.elements()?;
        let mut seen = HashSet::with_capacity(a.len().max(b.len()));
        for p in &a {
            for q in &b {
                seen.insert(p.index() ^ q.index());
            }
        }
        Ok(seen.len() as u64)
    }
}
