//! Scalar backends.
//!
//! Every matrix and state in this crate is generic over [`Scalar`]. Two
//! families implement it:
//!
//! * [`ExactScalar`], elements of the ring ℤ[ω]/√2^k with ω = e^{iπ/4}. All
//!   entries of Clifford+T unitaries live here, so equality tests are exact.
//! * `Complex<F>` for `F` in {`f32`, `f64`}, compared with a fixed tolerance.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{Float, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Which arithmetic a matrix or report was computed with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
    Float32,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
            Backend::Float32 => "float32",
        })
    }
}

pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const BACKEND: Backend;

    fn conj(&self) -> Self;

    /// e^{iπ/4}
    fn omega() -> Self;

    fn inv_sqrt2() -> Self;

    fn from_i64(v: i64) -> Self;

    fn to_c64(&self) -> Complex<f64>;

    /// Exact backends only accept values they can represent without rounding.
    fn from_c64(c: Complex<f64>) -> Option<Self>;

    /// Exact equality for the exact backend, tolerance comparison otherwise.
    fn approx_eq(&self, other: &Self) -> bool;

    fn is_negligible(&self) -> bool;

    /// A unit-modulus `u` such that `self * u` is real and positive.
    fn align_phase(&self) -> Option<Self>;

    fn mul_ref(&self, rhs: &Self) -> Self;

    fn add_assign_ref(&mut self, rhs: &Self);

    fn i() -> Self {
        Self::omega().mul_ref(&Self::omega())
    }

    fn omega_pow(k: u32) -> Self {
        let k = k % 8;
        let even = Self::i_pow(k / 2);
        if k % 2 == 1 {
            even.mul_ref(&Self::omega())
        } else {
            even
        }
    }

    fn i_pow(k: u32) -> Self {
        match k % 4 {
            0 => Self::one(),
            1 => Self::i(),
            2 => -Self::one(),
            _ => -Self::i(),
        }
    }

    fn inv_sqrt2_pow(k: u32) -> Self {
        let half = Self::inv_sqrt2().mul_ref(&Self::inv_sqrt2());
        let mut out = Self::one();
        for _ in 0..k / 2 {
            out = out.mul_ref(&half);
        }
        if k % 2 == 1 {
            out = out.mul_ref(&Self::inv_sqrt2());
        }
        out
    }

    /// `Some(+1)` or `Some(-1)` when the value is ±1 under this backend's
    /// equality.
    fn sign_if_unit(&self) -> Option<i8> {
        if self.approx_eq(&Self::one()) {
            Some(1)
        } else if self.approx_eq(&-Self::one()) {
            Some(-1)
        } else {
            None
        }
    }
}

/// Floating point component types usable inside `Complex<F>`.
pub trait Real: Float + fmt::Debug + Send + Sync + 'static {
    const BACKEND: Backend;
    /// Largest modulus difference still counted as equal.
    const TOLERANCE: f64;
}

impl Real for f64 {
    const BACKEND: Backend = Backend::Float;
    const TOLERANCE: f64 = 1e-8;
}

impl Real for f32 {
    const BACKEND: Backend = Backend::Float32;
    const TOLERANCE: f64 = 1e-4;
}

impl<F: Real> Scalar for Complex<F> {
    const BACKEND: Backend = F::BACKEND;

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn omega() -> Self {
        let h = F::from(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        Complex::new(h, h)
    }

    fn inv_sqrt2() -> Self {
        Complex::new(F::from(std::f64::consts::FRAC_1_SQRT_2).unwrap(), F::zero())
    }

    fn i() -> Self {
        Complex::new(F::zero(), F::one())
    }

    fn from_i64(v: i64) -> Self {
        Complex::new(F::from(v).unwrap(), F::zero())
    }

    fn to_c64(&self) -> Complex<f64> {
        Complex::new(self.re.to_f64().unwrap(), self.im.to_f64().unwrap())
    }

    fn from_c64(c: Complex<f64>) -> Option<Self> {
        Some(Complex::new(F::from(c.re)?, F::from(c.im)?))
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (*self - *other).norm().to_f64().unwrap() <= F::TOLERANCE
    }

    fn is_negligible(&self) -> bool {
        self.norm().to_f64().unwrap() <= F::TOLERANCE
    }

    fn align_phase(&self) -> Option<Self> {
        let r = self.norm();
        if r.to_f64().unwrap() <= F::TOLERANCE {
            return None;
        }
        Some(Complex::conj(self) / r)
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        *self * *rhs
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = *self + *rhs;
    }
}

/// An element `(a + bω + cω² + dω³) / √2^k` of ℤ[ω, 1/√2].
///
/// Values are kept in canonical form: `k` is as small as possible, and zero
/// is stored with `k == 0`. Two canonical values are equal iff their fields
/// are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    coeffs: [BigInt; 4],
    k: u32,
}

fn times_sqrt2([a, b, c, d]: [BigInt; 4]) -> [BigInt; 4] {
    // √2 = ω − ω³
    [&b - &d, &a + &c, &b + &d, c - a]
}

impl ExactScalar {
    pub fn new(coeffs: [BigInt; 4], k: u32) -> Self {
        let mut s = ExactScalar { coeffs, k };
        s.canonicalize();
        s
    }

    pub fn from_ints(coeffs: [i64; 4], k: u32) -> Self {
        Self::new(coeffs.map(BigInt::from), k)
    }

    pub fn coeffs(&self) -> &[BigInt; 4] {
        &self.coeffs
    }

    /// The exponent `k` of the `√2^k` denominator.
    pub fn sqrt2_exp(&self) -> u32 {
        self.k
    }

    pub fn is_real(&self) -> bool {
        self.coeffs[2].is_zero() && (&self.coeffs[1] + &self.coeffs[3]).is_zero()
    }

    fn canonicalize(&mut self) {
        if self.coeffs.iter().all(Zero::is_zero) {
            self.k = 0;
            return;
        }
        while self.k > 0 {
            let [a, b, c, d] = &self.coeffs;
            if !(a - c).is_even() || !(b - d).is_even() {
                break;
            }
            let two = BigInt::from(2);
            self.coeffs = [
                (b - d) / &two,
                (a + c) / &two,
                (b + d) / &two,
                (c - a) / &two,
            ];
            self.k -= 1;
        }
    }

    fn lifted(&self, k: u32) -> [BigInt; 4] {
        debug_assert!(k >= self.k);
        let delta = k - self.k;
        let mut c = self.coeffs.clone();
        if delta >= 2 {
            let shift = (delta / 2) as usize;
            c = c.map(|x| x << shift);
        }
        if delta % 2 == 1 {
            c = times_sqrt2(c);
        }
        c
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.coeffs;
        write!(f, "({a},{b},{c},{d})/√2^{}", self.k)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Zero for ExactScalar {
    fn zero() -> Self {
        ExactScalar {
            coeffs: [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()],
            k: 0,
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl One for ExactScalar {
    fn one() -> Self {
        Self::from_ints([1, 0, 0, 0], 0)
    }
}

impl Add for ExactScalar {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.add_assign_ref(&rhs);
        self
    }
}

impl Sub for ExactScalar {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.add_assign_ref(&-rhs);
        self
    }
}

impl Neg for ExactScalar {
    type Output = Self;
    fn neg(self) -> Self {
        ExactScalar {
            coeffs: self.coeffs.map(|c| -c),
            k: self.k,
        }
    }
}

impl Mul for ExactScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl Scalar for ExactScalar {
    const BACKEND: Backend = Backend::Exact;

    fn conj(&self) -> Self {
        // ω̄ = −ω³, ω̄² = −ω², ω̄³ = −ω
        let [a, b, c, d] = &self.coeffs;
        ExactScalar {
            coeffs: [a.clone(), -d, -c, -b],
            k: self.k,
        }
    }

    fn omega() -> Self {
        Self::from_ints([0, 1, 0, 0], 0)
    }

    fn inv_sqrt2() -> Self {
        Self::from_ints([1, 0, 0, 0], 1)
    }

    fn from_i64(v: i64) -> Self {
        Self::from_ints([v, 0, 0, 0], 0)
    }

    fn to_c64(&self) -> Complex<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let basis = [
            Complex::new(1.0, 0.0),
            Complex::new(h, h),
            Complex::new(0.0, 1.0),
            Complex::new(-h, h),
        ];
        let sum: Complex<f64> = self
            .coeffs
            .iter()
            .zip(basis)
            .map(|(c, w)| w * c.to_f64().unwrap_or(f64::NAN))
            .sum();
        sum / std::f64::consts::SQRT_2.powi(self.k as i32)
    }

    /// Accepts zero and the eighth roots of unity (within 1e-12).
    fn from_c64(c: Complex<f64>) -> Option<Self> {
        if c.norm() <= 1e-12 {
            return Some(Self::zero());
        }
        (0..8).find_map(|j| {
            let w = Complex::from_polar(1.0, std::f64::consts::FRAC_PI_4 * j as f64);
            ((c - w).norm() <= 1e-12).then(|| Self::omega_pow(j))
        })
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn align_phase(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        (0..8).find_map(|j| {
            let u = Self::omega_pow((8 - j) % 8);
            let rotated = self.mul_ref(&u);
            (rotated.is_real() && rotated.to_c64().re > 0.0).then_some(u)
        })
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out: [BigInt; 4] = Default::default();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let p = a * b;
                // ω⁴ = −1
                if i + j >= 4 {
                    out[i + j - 4] -= p;
                } else {
                    out[i + j] += p;
                }
            }
        }
        ExactScalar::new(out, self.k + rhs.k)
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        if rhs.is_zero() {
            return;
        }
        if self.is_zero() {
            *self = rhs.clone();
            return;
        }
        let k = self.k.max(rhs.k);
        let lhs = self.lifted(k);
        let rhs = rhs.lifted(k);
        let [a, b, c, d] = lhs;
        let [e, f, g, h] = rhs;
        self.coeffs = [a + e, b + f, c + g, d + h];
        self.k = k;
        self.canonicalize();
    }
}
