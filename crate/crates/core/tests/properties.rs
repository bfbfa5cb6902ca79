use proptest::prelude::*;

use pqbern::bivariate::{bi_apply, bi_moment_closed, BiMoment, BiOperator, BiParams};
use pqbern::convergence::{
    delta_m_sq, delta_n_sq, delta_nm_sq, Direction, KSurrogate, ModulusCurve, DEFAULT_FAMILY,
};
use pqbern::pq_core::{bracket, pq_binomial, pq_integer};
use pqbern::scalar::{rational, Rational};
use pqbern::schedule::ParamSchedule;
use pqbern::target::{Builtin, TargetFunction};
use pqbern::univariate::{uni_apply, uni_basis, uni_moment_closed, UniOperator};
use pqbern::voronovskaja::{scaled_central_moment_limit_check, voronovskaja_trace};
use pqbern::{PQPair, Scalar};

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// Admissible float pairs `0 < q < p <= 1`.
fn float_pair() -> impl Strategy<Value = PQPair> {
    (0.05f64..=1.0, 0.01f64..0.99).prop_map(|(p, t)| PQPair::new(p, p * t).unwrap())
}

/// Admissible rational pairs with small denominators.
fn exact_pair() -> impl Strategy<Value = PQPair<Rational>> {
    (1i64..=12, 1i64..=12, 1i64..=12).prop_filter_map("needs q < p <= 1", |(a, b, d)| {
        let (pn, qn) = (a.max(b), a.min(b));
        (qn < pn && pn <= d).then(|| PQPair::new(rational(pn, d), rational(qn, d)).unwrap())
    })
}

fn unit() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), 0.0f64..=1.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pq_integer_recurrences_are_exact(pq in exact_pair(), n in 1i64..=100) {
        let prev = bracket(n - 1, &pq);
        let cur = bracket(n, &pq);
        prop_assert_eq!(&cur, &(pq.p().clone() * prev.clone() + pq.q().powi(n - 1)));
        prop_assert_eq!(&cur, &(pq.q().clone() * prev + pq.p().powi(n - 1)));
    }

    #[test]
    fn binomial_is_symmetric(pq in float_pair(), n in 0u32..=60, k in 0u32..=60) {
        let k = k.min(n);
        let a = pq_binomial(n, k, &pq).unwrap();
        let b = pq_binomial(n, n - k, &pq).unwrap();
        prop_assert!(rel_close(a, b, 1e-12), "{a} vs {b}");
    }

    #[test]
    fn float_path_tracks_exact_path(pq in exact_pair(), n in 0u32..=60, k in 0u32..=60) {
        let k = k.min(n);
        let fpq = pq.to_f64();
        prop_assert!(rel_close(pq_integer(n, &fpq), pq_integer(n, &pq).to_f64(), 1e-12));
        let exact = pq_binomial(n, k, &pq).unwrap().to_f64();
        prop_assert!(rel_close(pq_binomial(n, k, &fpq).unwrap(), exact, 1e-12));
    }

    #[test]
    fn p_one_gives_q_integers(qn in 1i64..12, d in 2i64..=12, n in 0u32..=40) {
        prop_assume!(qn < d);
        let q = rational(qn, d);
        let pq = PQPair::new(rational(1, 1), q.clone()).unwrap();
        let one = rational(1, 1);
        let classical = (one.clone() - q.powi(n as i64)) / (one - q);
        prop_assert_eq!(pq_integer(n, &pq), classical);
    }

    #[test]
    fn partition_of_unity(pq in float_pair(), n in 1u32..=100, x in unit()) {
        let total: f64 = (0..=n).map(|k| uni_basis(n, k, &x, &pq).unwrap()).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12, "{total}");
        let row = UniOperator::new(n, pq).unwrap().weights(&x).unwrap();
        prop_assert!(row.iter().all(|&w| w >= -1e-15));
    }

    #[test]
    fn endpoints_interpolate(pq in float_pair(), n in 1u32..=80, c in -3.0f64..3.0) {
        let f = |t: &f64| Ok((c * t).sin() + t * t);
        let at0 = uni_apply(f, n, &0.0, &pq).unwrap();
        let at1 = uni_apply(f, n, &1.0, &pq).unwrap();
        prop_assert!((at0 - f(&0.0).unwrap()).abs() <= 1e-12);
        prop_assert!((at1 - f(&1.0).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn float_moments_match_operator(pq in float_pair(), n in 1u32..=40, xi in 0u32..=20, i in 0u32..=4) {
        let x = xi as f64 / 20.0;
        let closed = uni_moment_closed(i, n, &x, &pq).unwrap();
        let applied = uni_apply(|t: &f64| Ok(f64::powi(*t, i as i32)), n, &x, &pq).unwrap();
        prop_assert!((closed - applied).abs() <= 1e-11, "{closed} vs {applied}");
    }

    #[test]
    fn positive_and_monotone(
        pq in float_pair(),
        x in unit(),
        f in prop::collection::vec(0.0f64..10.0, 31),
        bump in prop::collection::vec(0.0f64..1.0, 31),
    ) {
        let op = UniOperator::new(30, pq).unwrap();
        let mut k = 0;
        let bf = op.apply(&x, |_| { k += 1; Ok(f[k - 1]) }).unwrap();
        let mut k = 0;
        let bg = op.apply(&x, |_| { k += 1; Ok(f[k - 1] + bump[k - 1]) }).unwrap();
        prop_assert!(bf >= 0.0);
        prop_assert!(bf <= bg + 1e-12);
    }

    #[test]
    fn tensor_products_factor(
        pq1 in float_pair(), pq2 in float_pair(),
        n in 1u32..=20, m in 1u32..=20, xi in 0u32..=8, yi in 0u32..=8,
        a in -2.0f64..2.0, b in -2.0f64..2.0,
    ) {
        let (x, y) = (xi as f64 / 8.0, yi as f64 / 8.0);
        let f = move |s: &f64| (a * s).cos();
        let g = move |t: &f64| (b * t).exp();
        let params = BiParams::new(pq1, pq2, n, m).unwrap();
        let both = bi_apply(|s, t| Ok(f(s) * g(t)), &params, &x, &y).unwrap();
        let ux = uni_apply(|s| Ok(f(s)), n, &x, &pq1).unwrap();
        let uy = uni_apply(|t| Ok(g(t)), m, &y, &pq2).unwrap();
        prop_assert!((both - ux * uy).abs() <= 1e-12 * both.abs().max(1.0));
        for w in [BiMoment::One, BiMoment::S, BiMoment::T, BiMoment::ST] {
            let got = bi_apply(|s, t| Ok(w.eval(s, t)), &params, &x, &y).unwrap();
            prop_assert!((got - bi_moment_closed(w, &params, &x, &y).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn bivariate_operator_is_monotone(
        pq1 in float_pair(), pq2 in float_pair(), x in unit(), y in unit(),
        f in prop::collection::vec(-5.0f64..5.0, 9 * 7),
        bump in prop::collection::vec(0.0f64..1.0, 9 * 7),
    ) {
        let op = BiOperator::new(BiParams::new(pq1, pq2, 8, 6).unwrap()).unwrap();
        let (wx, wy) = op.weights(&x, &y).unwrap();
        let mut k = 0;
        let bf = op.apply_weighted(&wx, &wy, |_, _| { k += 1; Ok(f[k - 1]) }).unwrap();
        let mut k = 0;
        let bg = op.apply_weighted(&wx, &wy, |_, _| { k += 1; Ok(f[k - 1] + bump[k - 1]) }).unwrap();
        prop_assert!(bf <= bg + 1e-12);
    }

    #[test]
    fn delta_squares_add(pq1 in exact_pair(), pq2 in exact_pair(), n in 1u32..=8, m in 1u32..=8,
                         xi in 0i64..=6, yi in 0i64..=6) {
        let (x, y) = (rational(xi, 6), rational(yi, 6));
        let params = BiParams::new(pq1, pq2, n, m).unwrap();
        let sum = delta_n_sq(&params, &x).unwrap() + delta_m_sq(&params, &y).unwrap();
        prop_assert_eq!(delta_nm_sq(&params, &x, &y).unwrap(), sum);
    }

    #[test]
    fn moduli_are_monotone_and_subadditive(
        which in 0usize..6, d1 in 0.0f64..0.6, d2 in 0.0f64..0.6,
    ) {
        let f = TargetFunction::builtin(Builtin::ALL[which + 2]);
        let grid = 40;
        for dir in [Direction::Complete, Direction::PartialX, Direction::PartialY] {
            let w = ModulusCurve::build(&f, dir, grid).unwrap();
            let (lo, hi) = (d1.min(d2), d1.max(d2));
            prop_assert!(w.value(lo) <= w.value(hi));
            let slack = 2.0 * w.value(2f64.sqrt() / grid as f64);
            prop_assert!(w.value(d1 + d2) <= w.value(d1) + w.value(d2) + slack + 1e-12);
        }
    }

    #[test]
    fn k_surrogate_is_nonnegative_and_monotone(
        values in prop::collection::vec(-1.0f64..1.0, 21 * 21), d1 in 0.0f64..1.0, d2 in 0.0f64..1.0,
    ) {
        let k = KSurrogate::from_samples(&values, 20, &DEFAULT_FAMILY).unwrap();
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        prop_assert!(k.value(lo) >= 0.0);
        prop_assert!(k.value(lo) <= k.value(hi));
    }

    #[test]
    fn schedules_are_admissible(n in 2u32..100_000) {
        for s in ParamSchedule::builtin() {
            let pq = s.pair(n).unwrap();
            prop_assert!(*pq.q() < *pq.p() && *pq.p() <= 1.0);
        }
    }
}

#[test]
fn classical_limit_is_approached_monotonically() {
    let (n, x) = (12u32, 0.37);
    let f = |t: f64| (3.0 * t).sin() + t;
    let mut binom = 1.0;
    let mut classical = 0.0;
    for k in 0..=n {
        if k > 0 {
            binom *= (n - k + 1) as f64 / k as f64;
        }
        classical += binom
            * f64::powi(x, k as i32)
            * f64::powi(1.0 - x, (n - k) as i32)
            * f(k as f64 / n as f64);
    }
    let gaps: Vec<f64> = (2..=6)
        .map(|e| {
            let pq = PQPair::new(1.0, 1.0 - 10f64.powi(-e)).unwrap();
            (uni_apply(|t| Ok(f(*t)), n, &x, &pq).unwrap() - classical).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[4] < 1e-6);
}

#[test]
fn second_moment_limits_for_every_schedule() {
    let degrees = [256, 512, 1024, 2048];
    for s in ParamSchedule::builtin() {
        for x in [0.25, 0.5, 0.75] {
            let t = scaled_central_moment_limit_check(2, &s, x, &degrees).unwrap();
            assert!(
                t.abs_errors.windows(2).all(|w| w[1] <= w[0] + 1e-15),
                "{} {x}: {:?}",
                s.name(),
                t.abs_errors
            );
            assert!(
                t.abs_errors[3] <= 5e-3,
                "{} {x}: {:?}",
                s.name(),
                t.abs_errors
            );
        }
    }
}

#[test]
fn linear_and_bilinear_traces_vanish() {
    for b in [
        Builtin::Const1,
        Builtin::LinX,
        Builtin::LinY,
        Builtin::ProdXY,
    ] {
        let f = TargetFunction::builtin(b);
        for s in ParamSchedule::builtin() {
            let t = voronovskaja_trace(&f, &s, (0.3, 0.8), &[16, 64, 256], false).unwrap();
            assert!(
                t.scaled_values.iter().all(|v| v.abs() <= 1e-12),
                "{} {}: {:?}",
                b.name(),
                s.name(),
                t.scaled_values
            );
        }
    }
}

#[test]
fn extrapolated_traces_match_limits() {
    for b in [Builtin::Quad, Builtin::Ripple] {
        let f = TargetFunction::builtin(b);
        for s in ParamSchedule::builtin() {
            for point in [(0.5, 0.5), (0.3, 0.7)] {
                let t = voronovskaja_trace(&f, &s, point, &[1024, 2048], false).unwrap();
                let r = t.richardson().unwrap();
                assert!(
                    rel_close(r, t.predicted_limit, 1e-2),
                    "{} {} {point:?}: {r} vs {}",
                    b.name(),
                    s.name(),
                    t.predicted_limit
                );
            }
        }
    }
}
