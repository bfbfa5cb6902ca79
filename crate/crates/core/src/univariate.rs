//! The univariate (p,q)-Bernstein operator
//!
//! ```text
//! B_n f(x) = sum_k R_{n,k}(x) f([k] / ([n] p^(k-n)))
//! R_{n,k}(x) = p^((k(k-1) - n(n-1))/2) [n over k] x^k prod_{s<n-k} (p^s - q^s x)
//! ```
//!
//! together with its closed-form raw moments `B_n(t^i)` for `i <= 4` and the
//! central moments of order 2 and 4.

use crate::error::{Error, Result};
use crate::pq_core::{bracket, falling_product, pq_integers_upto, PQPair};
use crate::scalar::{NeumaierSum, Scalar};

fn check_unit<T: Scalar>(x: &T, what: &str) -> Result<()> {
    if !(*x >= T::zero() && *x <= T::one()) {
        return Err(Error::domain(format!("{what} = {x:?} is outside [0, 1]")));
    }
    Ok(())
}

/// The literal basis formula, used by the exact path.
pub(crate) fn basis_direct<T: Scalar>(n: u32, k: u32, x: &T, pq: &PQPair<T>) -> T {
    let (n_i, k_i) = (n as i64, k as i64);
    let p_exp = (k_i * (k_i - 1) - n_i * (n_i - 1)) / 2;
    pq.p().powi(p_exp) * T::pq_binomial(n, k, pq) * x.powi(k_i) * falling_product(x, n - k, pq)
}

/// [`basis_direct`] for every `k`, sharing the factorial, power and product tables.
pub(crate) fn basis_row_direct<T: Scalar>(n: u32, x: &T, pq: &PQPair<T>) -> Vec<T> {
    let nu = n as usize;
    let ints = pq_integers_upto(n, pq);
    let mut fact = vec![T::one(); nu + 1];
    let mut fall = vec![T::one(); nu + 1];
    let mut x_pow = vec![T::one(); nu + 1];
    let (mut p_s, mut q_s) = (T::one(), T::one());
    for j in 1..=nu {
        fact[j] = fact[j - 1].clone() * ints[j].clone();
        fall[j] = fall[j - 1].clone() * (p_s.clone() - q_s.clone() * x.clone());
        x_pow[j] = x_pow[j - 1].clone() * x.clone();
        p_s = p_s * pq.p().clone();
        q_s = q_s * pq.q().clone();
    }
    let n_i = n as i64;
    (0..=nu)
        .map(|k| {
            let k_i = k as i64;
            let p_exp = (k_i * (k_i - 1) - n_i * (n_i - 1)) / 2;
            pq.p().powi(p_exp)
                * (fact[nu].clone() / (fact[k].clone() * fact[nu - k].clone()))
                * x_pow[k].clone()
                * fall[nu - k].clone()
        })
        .collect()
}

// The p-powers cancel: R_{n,k}(x) = [n over k]_{1,r} x^k prod_{s<n-k} (1 - r^s x)
// with r = q/p. The float kernels work from that form in log space.

fn ln_r_integers(n: u32, r: f64) -> Vec<f64> {
    let mut ints = Vec::with_capacity(n as usize + 1);
    ints.push(f64::NEG_INFINITY);
    let mut cur = 0.0;
    for _ in 1..=n {
        cur = 1.0 + r * cur;
        ints.push(cur.ln());
    }
    ints
}

fn ln_x_pow(k: u32, x: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * x.ln()
    }
}

pub(crate) fn basis_log_domain(n: u32, k: u32, x: f64, pq: &PQPair<f64>) -> f64 {
    let r = pq.ratio();
    let ln_ints = ln_r_integers(n, r);
    let kk = k.min(n - k) as usize;
    let mut ln_binom = NeumaierSum::default();
    for i in 1..=kk {
        ln_binom.add(ln_ints[n as usize - kk + i]);
        ln_binom.add(-ln_ints[i]);
    }
    let mut ln_fall = NeumaierSum::default();
    for s in 0..(n - k) as i32 {
        ln_fall.add((-(r.powi(s) * x)).ln_1p());
    }
    (ln_binom.value() + ln_x_pow(k, x) + ln_fall.value()).exp()
}

pub(crate) fn basis_row_log_domain(n: u32, x: f64, pq: &PQPair<f64>) -> Vec<f64> {
    let nu = n as usize;
    let r = pq.ratio();
    let ln_ints = ln_r_integers(n, r);

    // ln [n over k]_r for k <= n/2, mirrored for the upper half.
    let mut ln_binom = vec![0.0; nu + 1];
    let mut acc = NeumaierSum::default();
    for k in 0..nu / 2 {
        acc.add(ln_ints[nu - k]);
        acc.add(-ln_ints[k + 1]);
        ln_binom[k + 1] = acc.value();
    }
    for k in 0..=nu / 2 {
        ln_binom[nu - k] = ln_binom[k];
    }

    // ln prod_{s<c} (1 - r^s x) for c = 0..=n
    let mut ln_fall = vec![0.0; nu + 1];
    let mut acc = NeumaierSum::default();
    let mut r_pow = 1.0;
    for c in 0..nu {
        acc.add((-(r_pow * x)).ln_1p());
        ln_fall[c + 1] = acc.value();
        r_pow *= r;
    }

    (0..=nu)
        .map(|k| (ln_binom[k] + ln_x_pow(k as u32, x) + ln_fall[nu - k]).exp())
        .collect()
}

/// `[j]_r` for `j = 0..=n`.
fn r_integers(n: u32, r: f64) -> Vec<f64> {
    let mut ints = vec![0.0; n as usize + 1];
    for j in 1..ints.len() {
        ints[j] = 1.0 + r * ints[j - 1];
    }
    ints
}

/// The basis row from the ratio `R_{k+1}/R_k = [n-k]/[k+1] x / (1 - r^(n-k-1) x)`,
/// run outward from the largest weight and normalised to sum to one. Relative
/// errors grow with distance from the mode, where the weights are negligible,
/// so moments stay accurate to a few ulps even at large `n`.
pub(crate) fn basis_row_recurrence(n: u32, x: f64, pq: &PQPair<f64>) -> Vec<f64> {
    let nu = n as usize;
    let mut w = vec![0.0; nu + 1];
    if x == 0.0 {
        w[0] = 1.0;
        return w;
    }
    if x == 1.0 {
        w[nu] = 1.0;
        return w;
    }
    let r = pq.ratio();
    let log_row = basis_row_log_domain(n, x, pq);
    let mode = (0..=nu).fold(
        0,
        |best, k| if log_row[k] > log_row[best] { k } else { best },
    );
    let ints = r_integers(n, r);
    let mut r_pows = vec![1.0; nu + 1];
    for j in 1..=nu {
        r_pows[j] = r_pows[j - 1] * r;
    }
    let ratio = |k: usize| ints[nu - k] / ints[k + 1] * x / (1.0 - r_pows[nu - k - 1] * x);
    w[mode] = 1.0;
    for k in mode..nu {
        w[k + 1] = w[k] * ratio(k);
    }
    for k in (0..mode).rev() {
        w[k] = w[k + 1] / ratio(k);
    }
    let total = f64::sum_all(w.iter().copied());
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Nodes `[k]_r / [n]_r`, equal to `[k] / ([n] p^(k-n))`.
pub(crate) fn nodes_reduced(n: u32, pq: &PQPair<f64>) -> Vec<f64> {
    let ints = r_integers(n, pq.ratio());
    let top = ints[n as usize];
    ints.iter().map(|v| v / top).collect()
}

/// Basis weight `R_{n,k}(x)`.
pub fn uni_basis<T: Scalar>(n: u32, k: u32, x: &T, pq: &PQPair<T>) -> Result<T> {
    if n == 0 {
        return Err(Error::param("degree n must be at least 1"));
    }
    if k > n {
        return Err(Error::IndexOutOfRange(format!(
            "basis index k={k} exceeds n={n}"
        )));
    }
    check_unit(x, "x")?;
    Ok(T::basis(n, k, x, pq))
}

/// Sample abscissa `[k] / ([n] p^(k-n))`.
pub fn uni_node<T: Scalar>(n: u32, k: u32, pq: &PQPair<T>) -> Result<T> {
    if k > n || n == 0 {
        return Err(Error::IndexOutOfRange(format!("node k={k}, n={n}")));
    }
    Ok(T::node_row(n, pq).swap_remove(k as usize))
}

pub(crate) fn node_row_direct<T: Scalar>(n: u32, pq: &PQPair<T>) -> Vec<T> {
    let ints = pq_integers_upto(n, pq);
    (0..=n)
        .map(|k| {
            pq.p().powi(n as i64 - k as i64) * ints[k as usize].clone() / ints[n as usize].clone()
        })
        .collect()
}

/// A univariate operator of fixed degree with its sample nodes precomputed.
#[derive(Debug, Clone)]
pub struct UniOperator<T: Scalar = f64> {
    n: u32,
    pq: PQPair<T>,
    nodes: Vec<T>,
}

impl<T: Scalar> UniOperator<T> {
    pub fn new(n: u32, pq: PQPair<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("degree n must be at least 1"));
        }
        let nodes = T::node_row(n, &pq);
        Ok(Self { n, pq, nodes })
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn pair(&self) -> &PQPair<T> {
        &self.pq
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// All basis weights at `x`.
    pub fn weights(&self, x: &T) -> Result<Vec<T>> {
        check_unit(x, "x")?;
        Ok(T::basis_row(self.n, x, &self.pq))
    }

    /// `B_n f(x)`, accumulated in ascending `k`.
    pub fn apply<F>(&self, x: &T, mut f: F) -> Result<T>
    where
        F: FnMut(&T) -> Result<T>,
    {
        let w = self.weights(x)?;
        let mut terms = Vec::with_capacity(w.len());
        for (wk, node) in w.iter().zip(&self.nodes) {
            // exact zeros contribute nothing
            if !(T::EXACT && wk.is_zero()) {
                terms.push(wk.clone() * f(node)?);
            }
        }
        // The weights sum to one; dividing by their computed sum makes
        // constants exact in floating point.
        Ok(normalized(T::sum_all(terms), &w))
    }

    /// [`apply`](Self::apply) for an infallible integrand.
    pub fn apply_fn<F: Fn(&T) -> T>(&self, x: &T, f: F) -> Result<T> {
        self.apply(x, |t| Ok(f(t)))
    }
}

/// `total / sum(weights)`, skipped when the weights already sum to one exactly.
pub(crate) fn normalized<T: Scalar>(total: T, weights: &[T]) -> T {
    if T::EXACT {
        total
    } else {
        total / T::sum_all(weights.iter().cloned())
    }
}

/// One-shot `B_{n,p,q}(f; x)`.
pub fn uni_apply<T, F>(f: F, n: u32, x: &T, pq: &PQPair<T>) -> Result<T>
where
    T: Scalar,
    F: FnMut(&T) -> Result<T>,
{
    UniOperator::new(n, pq.clone())?.apply(x, f)
}

/// Closed form of `B_n(t^i; x)` for `i` in `0..=4`.
///
/// For `i = 3, 4` these are the forms that agree with the operator exactly;
/// see [`uni_moment_variant`] for the alternative coefficient sets.
pub fn uni_moment_closed<T: Scalar>(i: u32, n: u32, x: &T, pq: &PQPair<T>) -> Result<T> {
    if n == 0 {
        return Err(Error::param("degree n must be at least 1"));
    }
    let p = pq.p().clone();
    let q = pq.q().clone();
    let ni = n as i64;
    let b = |m: i64| bracket(ni - m, pq);
    let bn = b(0);
    let x = x.clone();
    let c = |v: i64| T::from_int(v);
    let v = match i {
        0 => T::one(),
        1 => x,
        2 => p.powi(ni - 1) / bn.clone() * x.clone() + q.clone() * b(1) / bn * x.powi(2),
        3 => {
            let bn2 = bn.powi(2);
            p.powi(2 * ni - 2) / bn2.clone() * x.clone()
                + p.powi(ni - 2) * (c(2) * p.clone() + q.clone()) * q.clone() * b(1) / bn2.clone()
                    * x.powi(2)
                + q.powi(3) * b(1) * b(2) / bn2 * x.powi(3)
        }
        4 => {
            let bn3 = bn.powi(3);
            let pp = p.powi(2);
            let pq_ = p.clone() * q.clone();
            let qq = q.powi(2);
            p.powi(3 * ni - 3) / bn3.clone() * x.clone()
                + q.clone()
                    * (c(3) * pp.clone() + c(3) * pq_.clone() + qq.clone())
                    * b(1)
                    * p.powi(2 * ni - 4)
                    / bn3.clone()
                    * x.powi(2)
                + q.powi(3) * (c(3) * pp + c(2) * pq_ + qq) * b(1) * b(2) * p.powi(ni - 3)
                    / bn3.clone()
                    * x.powi(3)
                + q.powi(6) * b(1) * b(2) * b(3) / bn3 * x.powi(4)
        }
        _ => return Err(Error::domain(format!("moment index {i} not in 0..=4"))),
    };
    Ok(v)
}

/// Alternative closed forms for `B_n(t^3)` and `B_n(t^4)` that circulate with
/// different coefficients: `p^(n-1)` instead of `p^(n-2)` in the `x^2` term of
/// `e3`; `q^3` instead of `q^2` inside the `x^2` coefficient of `e4`, and no
/// `x` on its linear term. They do not reproduce the operator; reports use them
/// to show the size of the discrepancy.
pub fn uni_moment_variant<T: Scalar>(i: u32, n: u32, x: &T, pq: &PQPair<T>) -> Result<T> {
    let p = pq.p().clone();
    let q = pq.q().clone();
    let ni = n as i64;
    let b = |m: i64| bracket(ni - m, pq);
    let bn = b(0);
    let x = x.clone();
    let c = |v: i64| T::from_int(v);
    match i {
        3 => {
            let bn2 = bn.powi(2);
            Ok(p.powi(2 * ni - 2) / bn2.clone() * x.clone()
                + p.powi(ni - 1) * (c(2) * p.clone() + q.clone()) * q.clone() * b(1) / bn2.clone()
                    * x.powi(2)
                + q.powi(3) * b(1) * b(2) / bn2 * x.powi(3))
        }
        4 => {
            let bn3 = bn.powi(3);
            let pp = p.powi(2);
            let pq_ = p.clone() * q.clone();
            Ok(p.powi(3 * ni - 3) / bn3.clone()
                + q.clone()
                    * (c(3) * pp.clone() + c(3) * pq_.clone() + q.powi(3))
                    * b(1)
                    * p.powi(2 * ni - 4)
                    / bn3.clone()
                    * x.powi(2)
                + q.powi(3) * (c(3) * pp + c(2) * pq_ + q.powi(2)) * b(1) * b(2) * p.powi(ni - 3)
                    / bn3.clone()
                    * x.powi(3)
                + q.powi(6) * b(1) * b(2) * b(3) / bn3 * x.powi(4))
        }
        _ => uni_moment_closed(i, n, &x, pq),
    }
}

/// `B_n((t - x)^r; x)` for `r` in `{2, 4}`.
///
/// Order 4 is assembled from the raw moments:
/// `sum_j C(4,j) (-x)^(4-j) B_n(t^j; x)`.
pub fn uni_central_moment<T: Scalar>(r: u32, n: u32, x: &T, pq: &PQPair<T>) -> Result<T> {
    if n == 0 {
        return Err(Error::param("degree n must be at least 1"));
    }
    match r {
        2 => {
            let bn = bracket(n as i64, pq);
            Ok(pq.p().powi(n as i64 - 1) / bn * (x.clone() - x.powi(2)))
        }
        4 => {
            const C4: [i64; 5] = [1, 4, 6, 4, 1];
            let neg_x = -x.clone();
            let mut terms = Vec::with_capacity(5);
            for (j, c) in C4.iter().enumerate() {
                let m = uni_moment_closed(j as u32, n, x, pq)?;
                terms.push(T::from_int(*c) * neg_x.powi(4 - j as i64) * m);
            }
            Ok(T::sum_all(terms))
        }
        _ => Err(Error::domain(format!(
            "central moment order {r} not in {{2, 4}}"
        ))),
    }
}

/// Coefficients `[A1, A2, A3, A4]` of an alternative expansion
/// `B_n((t-x)^4; x) = A1 x^4 + A2 x^3 + A3 x^2 + A4 x` found in the literature.
///
/// `A3` and `A4` are divided by the one-parameter `[n]_q^3` exactly as that
/// expansion states. Diagnostic only; [`uni_central_moment`] is authoritative.
pub fn quartic_variant_coefficients<T: Scalar>(n: u32, pq: &PQPair<T>) -> [T; 4] {
    let p = pq.p().clone();
    let q = pq.q().clone();
    let ni = n as i64;
    let c = |v: i64| T::from_int(v);
    let bn = bracket(ni, pq);
    let q_only = PQPair::new(T::one(), q.clone())
        .map(|pair| bracket(ni, &pair))
        .unwrap_or_else(|_| bn.clone());
    let bn2 = bn.powi(2);
    let bn3 = bn.powi(3);
    let qn3 = q_only.powi(3);
    let (p2, p3, q2, q3) = (p.powi(2), p.powi(3), q.powi(2), q.powi(3));
    let pq1 = p.clone() * q.clone();

    let a1 = (p.powi(ni - 3) * bn2.clone() * (-p2.clone() + c(2) * pq1.clone() - q2.clone())
        + p.powi(ni - 5) * bn.clone() * (-p3.clone() + c(3) * p.clone() * q2.clone() + q3.clone())
        - p.powi(3 * ni - 6)
            * (p2.clone() + p3.clone() + c(2) * p.clone() * q2.clone() + q3.clone()))
        / bn3.clone();
    let a2 = p.powi(ni - 3) * bn2 * (p2.clone() - c(2) * pq1.clone() + q2.clone()) / bn3.clone()
        + (p.powi(2 * ni - 5)
            * bn.clone()
            * (-q3.clone() - c(4) * p.clone() * q2.clone() - c(3) * p2.clone() * q.clone()
                + c(2) * p3.clone())
            - p.powi(3 * ni - 6)
                * (c(3) * p3 + c(3) * p.clone() * q2.clone() + c(5) * p2.clone() * q.clone() + q3))
            / bn3;
    let a3 = (p.powi(2 * ni - 4) * bn * (-p2.clone() + c(3) * pq1.clone() + q2.clone())
        - p.powi(3 * ni - 5) * (c(3) * p2 + q2 + c(3) * pq1))
        / qn3.clone();
    let a4 = p.powi(3 * ni - 3) / qn3;
    [a1, a2, a3, a4]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};

    fn rpq(p: (i64, i64), q: (i64, i64)) -> PQPair<Rational> {
        PQPair::new(rational(p.0, p.1), rational(q.0, q.1)).unwrap()
    }

    fn pow_fn(i: u32) -> impl Fn(&Rational) -> Rational {
        move |t: &Rational| t.powi(i as i64)
    }

    #[test]
    fn basis_endpoint_examples() {
        let pq = PQPair::new(0.9, 0.5).unwrap();
        for n in 1..=12 {
            assert!((uni_basis(n, 0, &0.0, &pq).unwrap() - 1.0).abs() < 1e-15);
            for k in 1..=n {
                assert_eq!(uni_basis(n, k, &0.0, &pq).unwrap(), 0.0);
            }
        }
        let r = rpq((9, 10), (1, 2));
        for n in 1..=8 {
            assert_eq!(
                uni_basis(n, 0, &rational(0, 1), &r).unwrap(),
                rational(1, 1)
            );
        }
    }

    #[test]
    fn basis_example_two_one() {
        // p^{-1} [2] x (1 - x) at x = 1/2 with p = 9/10, q = 1/2
        let r = rpq((9, 10), (1, 2));
        let got = uni_basis(2, 1, &rational(1, 2), &r).unwrap();
        let expected = rational(10, 9) * rational(14, 10) * rational(1, 4);
        assert_eq!(got, expected);
        assert!(got > rational(0, 1));
        let f = uni_basis(2, 1, &0.5, &PQPair::new(0.9, 0.5).unwrap()).unwrap();
        assert!((f - expected.to_f64()).abs() < 1e-15);
    }

    #[test]
    fn basis_domain_errors() {
        let pq = PQPair::new(0.9, 0.5).unwrap();
        assert!(matches!(uni_basis(3, 1, &1.5, &pq), Err(Error::Domain(_))));
        assert!(matches!(uni_basis(3, 1, &-0.1, &pq), Err(Error::Domain(_))));
        assert!(matches!(
            uni_basis(3, 1, &f64::NAN, &pq),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            uni_basis(3, 4, &0.5, &pq),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(uni_basis(0, 0, &0.5, &pq).is_err());
    }

    #[test]
    fn float_kernels_match_literal_formula() {
        for (p, q) in [((1, 1), (1, 2)), ((3, 4), (1, 2)), ((9, 10), (3, 5))] {
            let r = rpq(p, q);
            let f = r.to_f64();
            for n in 1..=15u32 {
                for xi in 0..=8 {
                    let xr = rational(xi, 8);
                    let xf = xi as f64 / 8.0;
                    let row = f64::basis_row(n, &xf, &f);
                    for k in 0..=n {
                        let exact = basis_direct(n, k, &xr, &r).to_f64();
                        let single = f64::basis(n, k, &xf, &f);
                        assert!((row[k as usize] - exact).abs() <= 1e-14 + 1e-12 * exact.abs());
                        assert!((single - exact).abs() <= 1e-14 + 1e-12 * exact.abs());
                    }
                }
            }
        }
    }

    #[test]
    fn reproduces_constants_and_linear_exactly() {
        let r = rpq((9, 10), (3, 5));
        for n in 1..=10 {
            let op = UniOperator::new(n, r.clone()).unwrap();
            for xi in 0..=4 {
                let x = rational(xi, 4);
                assert_eq!(op.apply_fn(&x, pow_fn(0)).unwrap(), rational(1, 1));
                assert_eq!(op.apply_fn(&x, pow_fn(1)).unwrap(), x);
            }
        }
    }

    #[test]
    fn closed_moments_match_operator_exactly() {
        for (p, q) in [
            ((1, 1), (1, 2)),
            ((3, 4), (1, 2)),
            ((9, 10), (3, 5)),
            ((19, 20), (7, 10)),
        ] {
            let r = rpq(p, q);
            for n in 1..=9 {
                let op = UniOperator::new(n, r.clone()).unwrap();
                for xi in [0, 1, 2, 5, 7, 9] {
                    let x = rational(xi, 9);
                    for i in 0..=4 {
                        let brute = op.apply_fn(&x, pow_fn(i)).unwrap();
                        let closed = uni_moment_closed(i, n, &x, &r).unwrap();
                        assert_eq!(brute, closed, "i={i} n={n} x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn variant_forms_disagree_with_operator() {
        let r = rpq((9, 10), (3, 5));
        let x = rational(2, 5);
        let op = UniOperator::new(6, r.clone()).unwrap();
        for i in [3, 4] {
            let brute = op.apply_fn(&x, pow_fn(i)).unwrap();
            assert_ne!(uni_moment_variant(i, 6, &x, &r).unwrap(), brute);
        }
        // at p = 1 the e3 variant coincides
        let r1 = rpq((1, 1), (3, 5));
        let op1 = UniOperator::new(6, r1.clone()).unwrap();
        assert_eq!(
            uni_moment_variant(3, 6, &x, &r1).unwrap(),
            op1.apply_fn(&x, pow_fn(3)).unwrap()
        );
    }

    #[test]
    fn moment_examples() {
        let pq = PQPair::new(0.95, 0.7).unwrap();
        assert_eq!(uni_moment_closed(0, 6, &0.4, &pq).unwrap(), 1.0);
        assert_eq!(uni_moment_closed(2, 6, &0.0, &pq).unwrap(), 0.0);
        let op = UniOperator::new(6, pq).unwrap();
        let brute = op.apply_fn(&0.4, |t| t.powi(4)).unwrap();
        assert!((brute - uni_moment_closed(4, 6, &0.4, &pq).unwrap()).abs() < 1e-14);
        assert!(matches!(
            uni_moment_closed(5, 6, &0.4, &pq),
            Err(Error::Domain(_))
        ));

        let pq = PQPair::new(0.9, 0.6).unwrap();
        let op = UniOperator::new(5, pq).unwrap();
        let brute = op.apply_fn(&0.3, |t| t * t).unwrap();
        let b5 = crate::pq_core::pq_integer(5, &pq);
        let b4 = crate::pq_core::pq_integer(4, &pq);
        let closed = 0.9f64.powi(4) / b5 * 0.3 + 0.6 * b4 / b5 * 0.09;
        assert!((brute - closed).abs() < 1e-15);
    }

    #[test]
    fn central_moment_examples() {
        let pq = PQPair::new(0.9, 0.5).unwrap();
        assert_eq!(uni_central_moment(2, 7, &0.0, &pq).unwrap(), 0.0);
        assert!(uni_central_moment(4, 7, &0.0, &pq).unwrap().abs() < 1e-16);
        assert!(matches!(
            uni_central_moment(3, 7, &0.5, &pq),
            Err(Error::Domain(_))
        ));

        let r = rpq((1, 1), (4, 5));
        let half = rational(1, 2);
        let got = uni_central_moment(2, 10, &half, &r).unwrap();
        let b10 = crate::pq_core::pq_integer(10, &r);
        assert_eq!(got, rational(1, 4) / b10);
        let op = UniOperator::new(10, r.clone()).unwrap();
        let brute = op
            .apply_fn(&half, |t| (t.clone() - half.clone()).powi(2))
            .unwrap();
        assert_eq!(got, brute);
    }

    #[test]
    fn quartic_central_moment_matches_brute_force() {
        let r = rpq((9, 10), (3, 5));
        for n in 1..=8 {
            let op = UniOperator::new(n, r.clone()).unwrap();
            for xi in 0..=4 {
                let x = rational(xi, 4);
                let brute = op
                    .apply_fn(&x, |t| (t.clone() - x.clone()).powi(4))
                    .unwrap();
                assert_eq!(uni_central_moment(4, n, &x, &r).unwrap(), brute);
            }
        }
    }

    #[test]
    fn quartic_variant_is_not_the_central_moment() {
        let r = rpq((9, 10), (3, 5));
        let x = rational(1, 2);
        let a = quartic_variant_coefficients(8, &r);
        let variant = a[0].clone() * x.powi(4)
            + a[1].clone() * x.powi(3)
            + a[2].clone() * x.powi(2)
            + a[3].clone() * x.clone();
        assert_ne!(variant, uni_central_moment(4, 8, &x, &r).unwrap());
    }

    #[test]
    fn endpoint_interpolation() {
        let pq = PQPair::new(0.8, 0.35).unwrap();
        let f = |t: &f64| (3.0 * t).sin() + t * t;
        for n in [1, 2, 5, 20, 100] {
            let op = UniOperator::new(n, pq).unwrap();
            assert!((op.apply_fn(&0.0, f).unwrap() - f(&0.0)).abs() < 1e-12);
            assert!((op.apply_fn(&1.0, f).unwrap() - f(&1.0)).abs() < 1e-12);
            assert_eq!(op.nodes()[n as usize], 1.0);
        }
    }

    #[test]
    fn approaches_classical_bernstein_as_q_tends_to_one() {
        let f = |t: f64| (2.0 * t).exp() * (5.0 * t).cos();
        let n = 12u32;
        let x: f64 = 0.37;
        let classical: f64 = (0..=n)
            .map(|k| {
                let c = (1..=k).fold(1.0, |a, i| a * (n - k + i) as f64 / i as f64);
                c * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32) * f(k as f64 / n as f64)
            })
            .sum();
        let diffs: Vec<f64> = (2..=6i32)
            .map(|e| {
                let pq = PQPair::new(1.0, 1.0 - 10f64.powi(-e)).unwrap();
                let v = UniOperator::new(n, pq)
                    .unwrap()
                    .apply_fn(&x, |t| f(*t))
                    .unwrap();
                (v - classical).abs()
            })
            .collect();
        assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{diffs:?}");
    }
}
