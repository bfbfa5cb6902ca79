//! (p,q)-integers, factorials, binomial coefficients and the falling product
//! that appears in the operator basis.

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// A validated parameter pair with `0 < q < p <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PQPair<T = f64> {
    p: T,
    q: T,
}

impl<T: Scalar> PQPair<T> {
    pub fn new(p: T, q: T) -> Result<Self> {
        let ok = q > T::zero() && q < p && p <= T::one();
        if !ok {
            return Err(Error::InvalidPair {
                p: format!("{p:?}"),
                q: format!("{q:?}"),
            });
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> &T {
        &self.p
    }

    pub fn q(&self) -> &T {
        &self.q
    }

    /// `q / p`, which lies in `(0, 1)`.
    pub fn ratio(&self) -> T {
        self.q.clone() / self.p.clone()
    }
}

impl PQPair<f64> {
    pub fn to_f64(&self) -> PQPair<f64> {
        *self
    }
}

impl PQPair<Rational> {
    pub fn to_f64(&self) -> PQPair<f64> {
        PQPair {
            p: self.p.to_f64(),
            q: self.q.to_f64(),
        }
    }
}

/// `[n]_{p,q} = sum_{i<n} p^(n-1-i) q^i`.
///
/// The summation form stays accurate as `q -> p`, where `(p^n - q^n)/(p - q)`
/// cancels catastrophically.
pub fn pq_integer<T: Scalar>(n: u32, pq: &PQPair<T>) -> T {
    if n == 0 {
        return T::zero();
    }
    let top = n as i64 - 1;
    T::sum_all((0..n as i64).map(|i| pq.p.powi(top - i) * pq.q.powi(i)))
}

/// `[m]_{p,q}` extended to all integers: zero for `m <= 0`.
pub fn bracket<T: Scalar>(m: i64, pq: &PQPair<T>) -> T {
    if m <= 0 {
        T::zero()
    } else {
        pq_integer(m as u32, pq)
    }
}

/// `[0]_{p,q}, [1]_{p,q}, ..., [n]_{p,q}` via `[k] = p [k-1] + q^(k-1)`.
///
/// Every term is positive, so the recurrence is as stable as the sum.
pub fn pq_integers_upto<T: Scalar>(n: u32, pq: &PQPair<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(T::zero());
    let mut q_pow = T::one();
    for k in 1..=n as usize {
        let next = pq.p.clone() * out[k - 1].clone() + q_pow.clone();
        out.push(next);
        q_pow = q_pow * pq.q.clone();
    }
    out
}

pub fn pq_factorial<T: Scalar>(n: u32, pq: &PQPair<T>) -> T {
    pq_integers_upto(n, pq)
        .into_iter()
        .skip(1)
        .fold(T::one(), |acc, v| acc * v)
}

/// `ln [n]_{p,q}!`, safe for degrees where the factorial overflows `f64`.
pub fn ln_pq_factorial(n: u32, pq: &PQPair<f64>) -> f64 {
    pq_integers_upto(n, pq).iter().skip(1).map(|v| v.ln()).sum()
}

/// `ln [n over k]_{p,q}` as `sum_{i=1..k} (ln [n-k+i] - ln [i])`.
pub fn ln_pq_binomial(n: u32, k: u32, pq: &PQPair<f64>) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let ints = pq_integers_upto(n, pq);
    let mut acc = 0.0;
    for i in 1..=k as usize {
        acc += ints[n as usize - k as usize + i].ln() - ints[i].ln();
    }
    acc
}

/// The (p,q)-binomial coefficient `[n]! / ([k]! [n-k]!)`.
pub fn pq_binomial<T: Scalar>(n: u32, k: u32, pq: &PQPair<T>) -> Result<T> {
    if k > n {
        return Err(Error::IndexOutOfRange(format!(
            "binomial index k={k} exceeds n={n}"
        )));
    }
    Ok(T::pq_binomial(n, k, pq))
}

pub(crate) fn binomial_by_factorials<T: Scalar>(n: u32, k: u32, pq: &PQPair<T>) -> T {
    let ints = pq_integers_upto(n, pq);
    let fact = |m: u32| {
        ints[1..=m as usize]
            .iter()
            .cloned()
            .fold(T::one(), |acc, v| acc * v)
    };
    fact(n) / (fact(k) * fact(n - k))
}

/// `prod_{s=0}^{count-1} (p^s - q^s x)`; the empty product is 1.
pub fn falling_product<T: Scalar>(x: &T, count: u32, pq: &PQPair<T>) -> T {
    (0..count as i64).fold(T::one(), |acc, s| {
        acc * (pq.p.powi(s) - pq.q.powi(s) * x.clone())
    })
}

/// Log of [`falling_product`] for `x` in `[0, 1]`; `-inf` when a factor vanishes.
pub fn ln_falling_product(x: f64, count: u32, pq: &PQPair<f64>) -> f64 {
    let r = pq.ratio();
    let ln_p = pq.p.ln();
    let mut acc = 0.0;
    for s in 0..count as i32 {
        // p^s - q^s x = p^s (1 - r^s x)
        let inner = (-(r.powi(s) * x)).ln_1p();
        acc += s as f64 * ln_p + inner;
    }
    acc
}

fn choose2(m: u32) -> i64 {
    let m = m as i64;
    m * (m - 1) / 2
}

/// Checks the (p,q)-binomial theorem
/// `prod_{s<n} (p^s a x + q^s b y) = sum_k p^C(n-k,2) q^C(k,2) [n over k] (ax)^(n-k) (by)^k`.
///
/// Exact for rationals; toleranced for floats.
pub fn pq_binomial_expansion_check<T: Scalar>(
    n: u32,
    a: &T,
    b: &T,
    x: &T,
    y: &T,
    pq: &PQPair<T>,
) -> Result<bool> {
    if n > 20 {
        return Err(Error::param(format!(
            "expansion check supports n <= 20, got {n}"
        )));
    }
    let ax = a.clone() * x.clone();
    let by = b.clone() * y.clone();
    let product = (0..n as i64).fold(T::one(), |acc, s| {
        acc * (pq.p.powi(s) * ax.clone() + pq.q.powi(s) * by.clone())
    });
    let sum = T::sum_all((0..=n).map(|k| {
        pq.p.powi(choose2(n - k))
            * pq.q.powi(choose2(k))
            * T::pq_binomial(n, k, pq)
            * ax.powi((n - k) as i64)
            * by.powi(k as i64)
    }));
    Ok(T::close(&product, &sum))
}
