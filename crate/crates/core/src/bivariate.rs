//! Tensor-product (p,q)-Bernstein operator on the unit square.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pq_core::{bracket, PQPair};
use crate::scalar::Scalar;
use crate::univariate::{normalized, uni_central_moment, uni_moment_closed, UniOperator};

/// Degrees and parameter pairs of one bivariate operator.
#[derive(Debug, Clone, PartialEq)]
pub struct BiParams<T = f64> {
    pub pq1: PQPair<T>,
    pub pq2: PQPair<T>,
    pub n: u32,
    pub m: u32,
}

impl<T: Scalar> BiParams<T> {
    pub fn new(pq1: PQPair<T>, pq2: PQPair<T>, n: u32, m: u32) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::param(format!(
                "degrees must be >= 1, got n={n}, m={m}"
            )));
        }
        Ok(Self { pq1, pq2, n, m })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            _ => Err(Error::domain(format!("unknown axis {s:?}"))),
        }
    }
}

/// Test monomials of total degree at most two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BiMoment {
    One,
    S,
    T,
    ST,
    S2,
    T2,
}

impl BiMoment {
    pub const ALL: [BiMoment; 6] = [
        BiMoment::One,
        BiMoment::S,
        BiMoment::T,
        BiMoment::ST,
        BiMoment::S2,
        BiMoment::T2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BiMoment::One => "1",
            BiMoment::S => "s",
            BiMoment::T => "t",
            BiMoment::ST => "st",
            BiMoment::S2 => "s2",
            BiMoment::T2 => "t2",
        }
    }

    /// The monomial evaluated at `(s, t)`.
    pub fn eval<T: Scalar>(self, s: &T, t: &T) -> T {
        match self {
            BiMoment::One => T::one(),
            BiMoment::S => s.clone(),
            BiMoment::T => t.clone(),
            BiMoment::ST => s.clone() * t.clone(),
            BiMoment::S2 => s.clone() * s.clone(),
            BiMoment::T2 => t.clone() * t.clone(),
        }
    }
}

impl FromStr for BiMoment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BiMoment::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown moment selector {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct BiOperator<T: Scalar = f64> {
    params: BiParams<T>,
    x_op: UniOperator<T>,
    y_op: UniOperator<T>,
}

impl<T: Scalar> BiOperator<T> {
    pub fn new(params: BiParams<T>) -> Result<Self> {
        let x_op = UniOperator::new(params.n, params.pq1.clone())?;
        let y_op = UniOperator::new(params.m, params.pq2.clone())?;
        Ok(Self { params, x_op, y_op })
    }

    pub fn params(&self) -> &BiParams<T> {
        &self.params
    }

    pub fn x_operator(&self) -> &UniOperator<T> {
        &self.x_op
    }

    pub fn y_operator(&self) -> &UniOperator<T> {
        &self.y_op
    }

    /// `B_{n,m} f(x, y)` as iterated sums: inner over `j`, outer over `k`.
    pub fn apply<F>(&self, x: &T, y: &T, mut f: F) -> Result<T>
    where
        F: FnMut(&T, &T) -> Result<T>,
    {
        let (wx, wy) = self.weights(x, y)?;
        self.apply_weighted(&wx, &wy, &mut f)
    }

    pub fn apply_fn<F: Fn(&T, &T) -> T>(&self, x: &T, y: &T, f: F) -> Result<T> {
        self.apply(x, y, |s, t| Ok(f(s, t)))
    }

    /// Both basis rows at `(x, y)`, for applying several functions at one point.
    pub fn weights(&self, x: &T, y: &T) -> Result<(Vec<T>, Vec<T>)> {
        Ok((self.x_op.weights(x)?, self.y_op.weights(y)?))
    }

    /// Same summation order as [`BiOperator::apply`], with precomputed weights.
    pub fn apply_weighted<F>(&self, wx: &[T], wy: &[T], mut f: F) -> Result<T>
    where
        F: FnMut(&T, &T) -> Result<T>,
    {
        let ny = self.y_op.nodes();
        let sum_y = (!T::EXACT).then(|| T::sum_all(wy.iter().cloned()));
        let mut outer = Vec::with_capacity(wx.len());
        let mut inner = Vec::with_capacity(wy.len());
        // Exact sums skip nodes whose weight is exactly zero.
        let skip = |w: &T| T::EXACT && w.is_zero();
        for (wk, sx) in wx.iter().zip(self.x_op.nodes()) {
            if skip(wk) {
                continue;
            }
            inner.clear();
            for (wj, ty) in wy.iter().zip(ny) {
                if !skip(wj) {
                    inner.push(wj.clone() * f(sx, ty)?);
                }
            }
            let row = T::sum_all(inner.drain(..));
            let row = match &sum_y {
                Some(s) => row / s.clone(),
                None => row,
            };
            outer.push(wk.clone() * row);
        }
        Ok(normalized(T::sum_all(outer), wx))
    }
}

impl BiOperator<f64> {
    /// `f` at every tensor node, row-major in `k` then `j`.
    pub fn tabulate<F>(&self, mut f: F) -> Result<Vec<f64>>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        let ny = self.y_op.nodes();
        let mut out = Vec::with_capacity(self.x_op.nodes().len() * ny.len());
        for &s in self.x_op.nodes() {
            for &t in ny {
                out.push(f(s, t)?);
            }
        }
        Ok(out)
    }

    /// [`BiOperator::apply_weighted`] over values from [`BiOperator::tabulate`].
    pub fn apply_tabulated(&self, wx: &[f64], wy: &[f64], table: &[f64]) -> f64 {
        let cols = wy.len();
        let sum_y = f64::sum_all(wy.iter().copied());
        let total = f64::sum_all(wx.iter().enumerate().map(|(k, wk)| {
            let row = &table[k * cols..(k + 1) * cols];
            wk * (f64::sum_all(wy.iter().zip(row).map(|(wj, v)| wj * v)) / sum_y)
        }));
        total / f64::sum_all(wx.iter().copied())
    }
}

/// `G + 1` equispaced points `i/G` on `[0,1]`, endpoints exact.
pub fn unit_grid(g: usize) -> Vec<f64> {
    (0..=g).map(|i| i as f64 / g as f64).collect()
}

/// `R_{n,k}(p1,q1; x) R_{m,j}(p2,q2; y)`.
pub fn bi_basis<T: Scalar>(params: &BiParams<T>, k: u32, j: u32, x: &T, y: &T) -> Result<T> {
    let a = crate::univariate::uni_basis(params.n, k, x, &params.pq1)?;
    let b = crate::univariate::uni_basis(params.m, j, y, &params.pq2)?;
    Ok(a * b)
}

pub fn bi_apply<T, F>(f: F, params: &BiParams<T>, x: &T, y: &T) -> Result<T>
where
    T: Scalar,
    F: FnMut(&T, &T) -> Result<T>,
{
    BiOperator::new(params.clone())?.apply(x, y, f)
}

/// Closed forms of the operator on the six test monomials.
pub fn bi_moment_closed<T: Scalar>(
    which: BiMoment,
    params: &BiParams<T>,
    x: &T,
    y: &T,
) -> Result<T> {
    Ok(match which {
        BiMoment::One => T::one(),
        BiMoment::S => x.clone(),
        BiMoment::T => y.clone(),
        BiMoment::ST => x.clone() * y.clone(),
        BiMoment::S2 => uni_moment_closed(2, params.n, x, &params.pq1)?,
        BiMoment::T2 => uni_moment_closed(2, params.m, y, &params.pq2)?,
    })
}

/// The `t^2` moment with `[n]_{p2,q2}` in the second denominator instead of
/// `[m]_{p2,q2}`. Differs from the operator whenever `n != m`.
pub fn bi_moment_t2_variant<T: Scalar>(params: &BiParams<T>, y: &T) -> T {
    let (p, q) = (params.pq2.p().clone(), params.pq2.q().clone());
    let m = params.m as i64;
    p.powi(m - 1) / bracket(m, &params.pq2) * y.clone()
        + q * bracket(m - 1, &params.pq2) / bracket(params.n as i64, &params.pq2) * y.powi(2)
}

/// `B((s-x)^2)` or `B((t-y)^2)`.
pub fn bi_central_moment2<T: Scalar>(axis: Axis, params: &BiParams<T>, x: &T, y: &T) -> Result<T> {
    match axis {
        Axis::X => uni_central_moment(2, params.n, x, &params.pq1),
        Axis::Y => uni_central_moment(2, params.m, y, &params.pq2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};

    fn fparams(n: u32, m: u32) -> BiParams {
        BiParams::new(
            PQPair::new(0.9, 0.5).unwrap(),
            PQPair::new(0.8, 0.4).unwrap(),
            n,
            m,
        )
        .unwrap()
    }

    fn rparams(n: u32, m: u32) -> BiParams<Rational> {
        BiParams::new(
            PQPair::new(rational(9, 10), rational(3, 5)).unwrap(),
            PQPair::new(rational(3, 4), rational(1, 2)).unwrap(),
            n,
            m,
        )
        .unwrap()
    }

    #[test]
    fn basis_examples() {
        let p = fparams(2, 2);
        assert!((bi_basis(&p, 0, 0, &0.0, &0.0).unwrap() - 1.0).abs() < 1e-15);
        let direct = crate::univariate::uni_basis(2, 1, &0.5, &p.pq1).unwrap()
            * crate::univariate::uni_basis(2, 1, &0.5, &p.pq2).unwrap();
        assert_eq!(bi_basis(&p, 1, 1, &0.5, &0.5).unwrap(), direct);
        let p = fparams(5, 3);
        let total: f64 = (0..=5)
            .flat_map(|k| (0..=3).map(move |j| (k, j)))
            .map(|(k, j)| bi_basis(&p, k, j, &0.3, &0.8).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!(bi_basis(&p, 6, 0, &0.3, &0.8).is_err());
        assert!(bi_basis(&p, 0, 0, &0.3, &1.8).is_err());
    }

    #[test]
    fn apply_examples() {
        let p = fparams(6, 4);
        let op = BiOperator::new(p.clone()).unwrap();
        assert!((op.apply_fn(&0.3, &0.7, |_, _| 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((op.apply_fn(&0.3, &0.7, |s, t| s * t).unwrap() - 0.21).abs() < 1e-15);
        let got = op.apply_fn(&0.3, &0.7, |s, _| s * s).unwrap();
        let b6 = crate::pq_core::pq_integer(6, &p.pq1);
        let b5 = crate::pq_core::pq_integer(5, &p.pq1);
        let closed = 0.9f64.powi(5) / b6 * 0.3 + 0.5 * b5 / b6 * 0.09;
        assert!((got - closed).abs() < 1e-15);
    }

    #[test]
    fn closed_moments_match_double_sum_exactly() {
        for (n, m) in [(1, 1), (2, 5), (4, 3), (6, 6)] {
            let p = rparams(n, m);
            let op = BiOperator::new(p.clone()).unwrap();
            for (xi, yi) in [(0, 0), (1, 3), (2, 2), (3, 1), (4, 4)] {
                let (x, y) = (rational(xi, 4), rational(yi, 4));
                for which in BiMoment::ALL {
                    let brute = op.apply_fn(&x, &y, |s, t| which.eval(s, t)).unwrap();
                    assert_eq!(brute, bi_moment_closed(which, &p, &x, &y).unwrap());
                }
            }
        }
    }

    #[test]
    fn t2_variant_differs_when_degrees_differ() {
        let p = rparams(3, 8);
        let y = rational(1, 2);
        let op = BiOperator::new(p.clone()).unwrap();
        let brute = op
            .apply_fn(&rational(0, 1), &y, |_, t| t.clone() * t.clone())
            .unwrap();
        assert_eq!(
            brute,
            bi_moment_closed(BiMoment::T2, &p, &rational(0, 1), &y).unwrap()
        );
        assert_ne!(brute, bi_moment_t2_variant(&p, &y));
        let sq = rparams(8, 8);
        assert_eq!(
            bi_moment_t2_variant(&sq, &y),
            bi_moment_closed(BiMoment::T2, &sq, &rational(0, 1), &y).unwrap()
        );
    }

    #[test]
    fn central_moment_examples() {
        let p = fparams(5, 10);
        assert_eq!(bi_central_moment2(Axis::X, &p, &0.0, &0.3).unwrap(), 0.0);
        assert_eq!(bi_central_moment2(Axis::X, &p, &1.0, &0.3).unwrap(), 0.0);

        let p = BiParams::new(
            PQPair::new(rational(9, 10), rational(1, 2)).unwrap(),
            PQPair::new(rational(1, 1), rational(4, 5)).unwrap(),
            5,
            10,
        )
        .unwrap();
        let (x, y) = (rational(1, 5), rational(1, 2));
        let b10 = crate::pq_core::pq_integer(10, &p.pq2);
        assert_eq!(
            bi_central_moment2(Axis::Y, &p, &x, &y).unwrap(),
            rational(1, 4) / b10
        );
        let op = BiOperator::new(p.clone()).unwrap();
        let brute_x = op
            .apply_fn(&x, &y, |s, _| (s.clone() - x.clone()).powi(2))
            .unwrap();
        assert_eq!(bi_central_moment2(Axis::X, &p, &x, &y).unwrap(), brute_x);
        let brute_y = op
            .apply_fn(&x, &y, |_, t| (t.clone() - y.clone()).powi(2))
            .unwrap();
        assert_eq!(bi_central_moment2(Axis::Y, &p, &x, &y).unwrap(), brute_y);
    }

    #[test]
    fn selectors_parse() {
        assert_eq!("st".parse::<BiMoment>().unwrap(), BiMoment::ST);
        assert!("s3".parse::<BiMoment>().is_err());
        assert_eq!("y".parse::<Axis>().unwrap(), Axis::Y);
    }
}
