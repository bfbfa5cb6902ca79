//! Number types shared by the float and exact evaluation paths.
//!
//! Every operator formula is written once against [`Scalar`]. `f64` overrides
//! the binomial, basis and node hooks with kernels that neither overflow nor
//! underflow at large degrees; [`Rational`] uses the literal formulas and serves as
//! the oracle for identity checks.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::pq_core::{self, PQPair};
use crate::univariate;

/// Arbitrary-precision rational used by the exact path.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Arithmetic without rounding. Basis rows of exact types sum to exactly one.
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    /// Integer power; negative exponents invert.
    fn powi(&self, exp: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Sum in iteration order. Floats use compensated summation.
    fn sum_all<I: IntoIterator<Item = Self>>(items: I) -> Self;

    /// Equality used by identity checks: exact for rationals, toleranced for floats.
    fn close(a: &Self, b: &Self) -> bool;

    fn pq_binomial(n: u32, k: u32, pq: &PQPair<Self>) -> Self {
        pq_core::binomial_by_factorials(n, k, pq)
    }

    fn basis(n: u32, k: u32, x: &Self, pq: &PQPair<Self>) -> Self {
        univariate::basis_direct(n, k, x, pq)
    }

    /// All `n + 1` basis weights at `x`, ascending in `k`.
    fn basis_row(n: u32, x: &Self, pq: &PQPair<Self>) -> Vec<Self> {
        univariate::basis_row_direct(n, x, pq)
    }

    /// The `n + 1` sample nodes, ascending in `k`.
    fn node_row(n: u32, pq: &PQPair<Self>) -> Vec<Self> {
        univariate::node_row_direct(n, pq)
    }
}

/// Relative tolerance for float-vs-exact comparisons.
pub const REL_TOL: f64 = 1e-12;
/// Absolute floor paired with [`REL_TOL`].
pub const ABS_FLOOR: f64 = 1e-14;

pub fn approx_eq(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= (REL_TOL * scale).max(ABS_FLOOR)
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn powi(&self, exp: i64) -> Self {
        match i32::try_from(exp) {
            Ok(e) => f64::powi(*self, e),
            Err(_) => self.powf(exp as f64),
        }
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sum_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
        let mut acc = NeumaierSum::default();
        for v in items {
            acc.add(v);
        }
        acc.value()
    }

    fn close(a: &Self, b: &Self) -> bool {
        approx_eq(*a, *b)
    }

    fn pq_binomial(n: u32, k: u32, pq: &PQPair<Self>) -> Self {
        pq_core::ln_pq_binomial(n, k, pq).exp()
    }

    fn basis(n: u32, k: u32, x: &Self, pq: &PQPair<Self>) -> Self {
        univariate::basis_log_domain(n, k, *x, pq)
    }

    fn basis_row(n: u32, x: &Self, pq: &PQPair<Self>) -> Vec<Self> {
        univariate::basis_row_recurrence(n, *x, pq)
    }

    fn node_row(n: u32, pq: &PQPair<Self>) -> Vec<Self> {
        univariate::nodes_reduced(n, pq)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn powi(&self, exp: i64) -> Self {
        let mag = num_traits::pow::pow(self.clone(), exp.unsigned_abs() as usize);
        if exp < 0 {
            mag.recip()
        } else {
            mag
        }
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sum_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
        items.into_iter().fold(Rational::zero(), |a, b| a + b)
    }

    fn close(a: &Self, b: &Self) -> bool {
        a == b
    }
}

/// Kahan-Babuska-Neumaier compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if !t.is_finite() {
            self.sum = t;
            self.comp = 0.0;
            return;
        }
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        if !self.sum.is_finite() {
            return self.sum;
        }
        self.sum + self.comp
    }
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

/// Parses `"3/5"`, `"0.9"`, `"1"`, `"2.5e-1"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::param(format!("not a rational number: {text:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0")
        .parse()
        .map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32 - 1;
    let ten = Rational::from_int(10);
    let mut value = Rational::from_integer(digits) * ten.powi(scale as i64);
    if neg {
        value = -value;
    }
    Ok(value)
}
