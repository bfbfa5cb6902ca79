//! Property and identity checks bundled for the `selftest` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bivariate::{
    bi_central_moment2, bi_moment_closed, bi_moment_t2_variant, Axis, BiMoment, BiOperator,
    BiParams,
};
use crate::convergence::{
    delta_m_sq, delta_n_sq, delta_nm_sq, Certifier, CertifyOptions, Direction, KSurrogate, Theorem,
    DEFAULT_FAMILY,
};
use crate::error::Result;
use crate::pq_core::{bracket, pq_binomial_expansion_check, PQPair};
use crate::scalar::{rational, Rational, Scalar};
use crate::schedule::ParamSchedule;
use crate::target::{Builtin, TargetFunction};
use crate::univariate::{
    quartic_variant_coefficients, uni_basis, uni_central_moment, uni_moment_closed,
    uni_moment_variant, UniOperator,
};
use crate::voronovskaja::scaled_central_moment_limit_check;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// A known discrepancy in a printed formula, reported rather than asserted.
    Documented,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Documented => "documented",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

fn check(name: &'static str, ok: bool, detail: String) -> Check {
    Check {
        name,
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

/// Parameter pairs of the exact identity suites.
pub fn exact_pairs() -> Vec<PQPair<Rational>> {
    [((1, 1), (1, 2)), ((3, 4), (1, 2)), ((9, 10), (3, 5))]
        .into_iter()
        .map(|((pn, pd), (qn, qd))| {
            PQPair::new(rational(pn, pd), rational(qn, qd)).expect("admissible")
        })
        .collect()
}

/// `0, 1/4, 1/2, 3/4, 1`.
pub fn exact_points() -> Vec<Rational> {
    (0..=4).map(|i| rational(i, 4)).collect()
}

fn monomial(i: u32) -> impl Fn(&Rational) -> Rational {
    move |t| t.powi(i as i64)
}

pub fn run_selftest(seed: u64) -> Result<Vec<Check>> {
    let mut out = vec![pq_recurrences(), binomial_expansion(), univariate_moments()];
    out.extend(statement_forms());
    out.push(bivariate_moments()?);
    out.push(t2_denominator()?);
    out.push(partition_of_unity()?);
    out.push(positivity_and_monotonicity(seed)?);
    out.push(tensor_consistency(seed)?);
    out.push(delta_decomposition()?);
    out.push(modulus_properties()?);
    out.push(k_surrogate_monotone()?);
    out.push(lemma_limits()?);
    out.push(certificate_smoke()?);
    Ok(out)
}

fn pq_recurrences() -> Check {
    let mut bad = 0;
    for pq in exact_pairs() {
        for n in 0..40i64 {
            let next = bracket(n + 1, &pq);
            let a = pq.p().powi(n) + pq.q().clone() * bracket(n, &pq);
            let b = pq.q().powi(n) + pq.p().clone() * bracket(n, &pq);
            bad += usize::from(next != a) + usize::from(next != b);
        }
    }
    check(
        "pq-integer-recurrences",
        bad == 0,
        format!("{bad} mismatches, n < 40, exact"),
    )
}

fn binomial_expansion() -> Check {
    let mut bad = 0;
    let (a, b) = (rational(2, 3), rational(5, 7));
    for pq in exact_pairs() {
        for n in 0..=10 {
            for x in exact_points() {
                let y = rational(1, 1) - x.clone();
                if !pq_binomial_expansion_check(n, &a, &b, &x, &y, &pq).unwrap_or(false) {
                    bad += 1;
                }
            }
        }
    }
    check(
        "pq-binomial-expansion",
        bad == 0,
        format!("{bad} mismatches, n <= 10, exact"),
    )
}

fn univariate_moments() -> Check {
    let mut bad = 0;
    let mut total = 0;
    for pq in exact_pairs() {
        for n in 1..=12 {
            let op = UniOperator::new(n, pq.clone()).expect("valid degree");
            for x in exact_points() {
                for i in 0..=4 {
                    total += 1;
                    let got = op.apply_fn(&x, monomial(i)).expect("x in range");
                    if uni_moment_closed(i, n, &x, &pq).ok() != Some(got) {
                        bad += 1;
                    }
                }
            }
        }
    }
    check(
        "moment-identities",
        bad == 0,
        format!("{bad} of {total} differ, n <= 12, i <= 4, exact"),
    )
}

/// How often the printed cubic, quartic and central quartic forms disagree with the operator.
fn statement_forms() -> Vec<Check> {
    let mut out = Vec::new();
    for (name, i) in [("e3-statement-form", 3u32), ("e4-statement-form", 4)] {
        let (mut differ, mut total) = (0, 0);
        for pq in exact_pairs() {
            for n in 2..=12 {
                let op = UniOperator::new(n, pq.clone()).expect("valid degree");
                for x in exact_points().into_iter().filter(|x| *x != rational(0, 1)) {
                    total += 1;
                    let got = op.apply_fn(&x, monomial(i)).expect("x in range");
                    if uni_moment_variant(i, n, &x, &pq).ok() != Some(got) {
                        differ += 1;
                    }
                }
            }
        }
        out.push(Check {
            name,
            status: Status::Documented,
            detail: format!("printed statement differs from the operator in {differ} of {total} cases; the derived form is exact"),
        });
    }
    let (mut differ, mut total) = (0, 0);
    for pq in exact_pairs() {
        for n in 4..=12 {
            let [a1, a2, a3, a4] = quartic_variant_coefficients(n, &pq);
            for x in exact_points().into_iter().filter(|x| *x != rational(0, 1)) {
                total += 1;
                let printed = a1.clone() * x.powi(4)
                    + a2.clone() * x.powi(3)
                    + a3.clone() * x.powi(2)
                    + a4.clone() * x.clone();
                if uni_central_moment(4, n, &x, &pq).ok() != Some(printed) {
                    differ += 1;
                }
            }
        }
    }
    out.push(Check {
        name: "central-quartic-coefficients",
        status: Status::Documented,
        detail: format!("printed A1..A4 differ from the assembled fourth central moment in {differ} of {total} cases"),
    });
    out
}

fn bivariate_moments() -> Result<Check> {
    let (mut bad, mut total) = (0, 0);
    let pairs = exact_pairs();
    let pts = [rational(0, 1), rational(1, 2), rational(3, 4)];
    for (a, pq1) in pairs.iter().enumerate() {
        let pq2 = &pairs[(a + 1) % pairs.len()];
        for n in 1..=6 {
            for m in 1..=6 {
                let params = BiParams::new(pq1.clone(), pq2.clone(), n, m)?;
                let op = BiOperator::new(params.clone())?;
                for x in &pts {
                    for y in &pts {
                        let (wx, wy) = op.weights(x, y)?;
                        for w in BiMoment::ALL {
                            total += 1;
                            let got = op.apply_weighted(&wx, &wy, |s, t| Ok(w.eval(s, t)))?;
                            bad += usize::from(got != bi_moment_closed(w, &params, x, y)?);
                        }
                        for axis in [Axis::X, Axis::Y] {
                            total += 1;
                            let got = op.apply_weighted(&wx, &wy, |s, t| {
                                Ok(match axis {
                                    Axis::X => (s.clone() - x.clone()).powi(2),
                                    Axis::Y => (t.clone() - y.clone()).powi(2),
                                })
                            })?;
                            bad += usize::from(got != bi_central_moment2(axis, &params, x, y)?);
                        }
                    }
                }
            }
        }
    }
    Ok(check(
        "bivariate-moments",
        bad == 0,
        format!("{bad} of {total} differ, n, m <= 6, exact"),
    ))
}

fn t2_denominator() -> Result<Check> {
    let pairs = exact_pairs();
    let y = rational(1, 2);
    let (mut differ, mut total) = (0, 0);
    for n in 1..=6 {
        for m in 1..=6 {
            if n == m {
                continue;
            }
            let params = BiParams::new(pairs[2].clone(), pairs[1].clone(), n, m)?;
            total += 1;
            differ += usize::from(
                bi_moment_t2_variant(&params, &y)
                    != bi_moment_closed(BiMoment::T2, &params, &y, &y)?,
            );
        }
    }
    Ok(Check {
        name: "t2-denominator",
        status: Status::Documented,
        detail: format!("[n] in the t^2 denominator disagrees with the operator in {differ} of {total} cases with n != m; [m] is exact"),
    })
}

fn partition_of_unity() -> Result<Check> {
    let mut worst_sum = 0.0f64;
    let mut min_weight = f64::INFINITY;
    for (p, q) in [(1.0, 0.5), (0.75, 0.5), (0.9, 0.6), (0.99, 0.98)] {
        let pq = PQPair::new(p, q)?;
        for n in 1..=100 {
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                let mut s = crate::scalar::NeumaierSum::default();
                for k in 0..=n {
                    let w = uni_basis(n, k, &x, &pq)?;
                    min_weight = min_weight.min(w);
                    s.add(w);
                }
                worst_sum = worst_sum.max((s.value() - 1.0).abs());
            }
        }
    }
    Ok(check(
        "partition-of-unity",
        worst_sum <= 1e-12 && min_weight >= -1e-15,
        format!("max |sum - 1| = {worst_sum:.3e}, min weight = {min_weight:.3e}, n <= 100"),
    ))
}

fn random_pair(rng: &mut ChaCha8Rng) -> PQPair {
    let p: f64 = rng.random_range(0.5..=1.0);
    let q = p * rng.random_range(0.05..0.999);
    PQPair::new(p, q).expect("q < p by construction")
}

fn positivity_and_monotonicity(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let params = BiParams::new(
            random_pair(&mut rng),
            random_pair(&mut rng),
            rng.random_range(1..40),
            rng.random_range(1..40),
        )?;
        let op = BiOperator::new(params)?;
        let (a, b, c) = (
            rng.random_range(-2.0..2.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..3.0),
        );
        let f = move |s: &f64, t: &f64| a * s * t + (3.0 * s).sin() - t;
        // g - f = c (s - b)^2 + |t - b| >= 0
        let g = move |s: &f64, t: &f64| f(s, t) + c * (s - b).powi(2) + (t - b).abs();
        let (x, y): (f64, f64) = (rng.random(), rng.random());
        let diff = op.apply_fn(&x, &y, g)? - op.apply_fn(&x, &y, f)?;
        worst = worst.min(diff);
    }
    Ok(check(
        "positivity-monotonicity",
        worst >= -1e-12,
        format!("min B g - B f over 200 random f <= g: {worst:.3e}"),
    ))
}

fn tensor_consistency(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut worst = 0.0f64;
    let grid: Vec<f64> = (0..9).map(|i| i as f64 / 8.0).collect();
    for _ in 0..30 {
        let params = BiParams::new(
            random_pair(&mut rng),
            random_pair(&mut rng),
            rng.random_range(1..=20),
            rng.random_range(1..=20),
        )?;
        let op = BiOperator::new(params.clone())?;
        let (a, b): (f64, f64) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let u = move |s: &f64| (a * s).sin() + 1.5;
        let v = move |t: &f64| (b * t).exp();
        for &x in &grid {
            for &y in &grid {
                let joint = op.apply_fn(&x, &y, |s, t| u(s) * v(t))?;
                let sep = op.x_operator().apply_fn(&x, u)? * op.y_operator().apply_fn(&y, v)?;
                worst = worst.max((joint - sep).abs() / sep.abs().max(1.0));
            }
        }
    }
    Ok(check(
        "tensor-consistency",
        worst <= 1e-12,
        format!("max relative gap {worst:.3e}, n, m <= 20, 9x9 grid"),
    ))
}

fn delta_decomposition() -> Result<Check> {
    let pairs = exact_pairs();
    let mut bad = 0;
    for n in 1..=8 {
        let params = BiParams::new(pairs[0].clone(), pairs[2].clone(), n, n + 1)?;
        for x in exact_points() {
            for y in exact_points() {
                let sum = delta_n_sq(&params, &x)? + delta_m_sq(&params, &y)?;
                bad += usize::from(delta_nm_sq(&params, &x, &y)? != sum);
            }
        }
    }
    Ok(check(
        "delta-decomposition",
        bad == 0,
        format!("{bad} mismatches, exact"),
    ))
}

fn modulus_properties() -> Result<Check> {
    let mut issues = Vec::new();
    for b in [Builtin::Quad, Builtin::Vee, Builtin::Ripple] {
        let f = TargetFunction::builtin(b);
        let c = Certifier::new(
            &f,
            CertifyOptions {
                modulus_grid: 60,
                ..Default::default()
            },
        );
        for dir in [
            Direction::Complete,
            Direction::PartialX,
            Direction::PartialY,
        ] {
            let w = c.modulus_curve(dir)?;
            // Lipschitz slack of one grid cell per argument.
            let slack = 2.0 * w.value(1.0 / 60.0 * 1.5);
            let mut prev = 0.0;
            for i in 0..=40 {
                let d = i as f64 * 0.025;
                let v = w.value(d);
                if v < prev {
                    issues.push(format!("{} {} decreases at {d}", b.name(), dir.name()));
                }
                prev = v;
                for j in 0..=40 - i {
                    let e = j as f64 * 0.025;
                    if w.value(d + e) > w.value(d) + w.value(e) + slack + 1e-12 {
                        issues.push(format!(
                            "{} {} not subadditive at {d}+{e}",
                            b.name(),
                            dir.name()
                        ));
                    }
                }
            }
            if w.value(0.0) != 0.0 {
                issues.push(format!("{} {} nonzero at 0", b.name(), dir.name()));
            }
        }
    }
    Ok(check(
        "modulus-monotone-subadditive",
        issues.is_empty(),
        issues
            .first()
            .cloned()
            .unwrap_or_else(|| "quad, vee, ripple on a 61x61 grid".into()),
    ))
}

fn k_surrogate_monotone() -> Result<Check> {
    let f = TargetFunction::builtin(Builtin::Ripple);
    let k = KSurrogate::build(&f, &DEFAULT_FAMILY, 80)?;
    let vals: Vec<f64> = (0..=50).map(|i| k.value(i as f64 * 0.02)).collect();
    let ok = vals[0] >= 0.0 && vals.windows(2).all(|w| w[0] <= w[1]);
    Ok(check(
        "k-surrogate-monotone",
        ok,
        format!("K(0) = {:.3e}, K(1) = {:.3e}", vals[0], vals[50]),
    ))
}

fn lemma_limits() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for s in ParamSchedule::builtin() {
        for x in [0.25, 0.5, 0.75] {
            let t = scaled_central_moment_limit_check(2, &s, x, &[2048])?;
            worst = worst.max(t.abs_errors[0]);
        }
    }
    Ok(check(
        "second-moment-limit",
        worst <= 5e-3,
        format!("max |[n] mu_2 - a(x - x^2)| at n = 2048: {worst:.3e}"),
    ))
}

fn certificate_smoke() -> Result<Check> {
    let f = TargetFunction::builtin(Builtin::Ripple);
    let c = Certifier::new(
        &f,
        CertifyOptions {
            grid: 20,
            modulus_grid: 80,
            k_grid: 80,
            derivative_grid: 80,
            ..Default::default()
        },
    );
    let s = ParamSchedule::rational();
    let params = BiParams::new(s.pair(8)?, s.pair(8)?, 8, 8)?;
    let ts = [
        Theorem::CompleteModulus,
        Theorem::PartialModuli,
        Theorem::C1,
        Theorem::PeetreK,
    ];
    let mut failed = Vec::new();
    for (t, r) in ts.iter().zip(c.certify_all(&ts, &params)?) {
        if !r?.pass {
            failed.push(t.id());
        }
    }
    Ok(check(
        "certificates-ripple-n8",
        failed.is_empty(),
        if failed.is_empty() {
            "4 bounds hold".into()
        } else {
            failed.join(" ")
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes_and_documents() {
        let checks = run_selftest(7).unwrap();
        for c in &checks {
            assert_ne!(c.status, Status::Fail, "{c:?}");
        }
        let doc = checks
            .iter()
            .filter(|c| c.status == Status::Documented)
            .count();
        assert_eq!(doc, 4);
        assert!(checks
            .iter()
            .find(|c| c.name == "e4-statement-form")
            .unwrap()
            .detail
            .contains("differs"));
    }
}
