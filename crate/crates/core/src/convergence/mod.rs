//! Error bounds for the bivariate operator, checked numerically.
//!
//! A [`BoundCertificate`] compares the measured error `|B f - f|` on a grid with
//! the right-hand side of one of five bounds, both node by node (with the
//! local `delta` values) and uniformly (with their grid sup). Moduli computed
//! on a grid sit below the true moduli, so the modulus bounds are also
//! evaluated at `2 delta`; that envelope decides the pass flag.

mod modulus;
mod peetre;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::bivariate::{unit_grid, BiOperator, BiParams};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::target::TargetFunction;
use crate::univariate::uni_central_moment;

pub use modulus::{
    complete_modulus, partial_modulus, sample, Direction, ModulusCurve, ModulusEstimate,
};
pub use peetre::{k_surrogate, KSurrogate, KTerm, DEFAULT_FAMILY, DEFAULT_K_GRID};

/// Slack allowed when comparing a measured error with a bound.
pub const BOUND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    CompleteModulus,
    PartialModuli,
    Lipschitz,
    C1,
    PeetreK,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [
        Theorem::CompleteModulus,
        Theorem::PartialModuli,
        Theorem::Lipschitz,
        Theorem::C1,
        Theorem::PeetreK,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::CompleteModulus => "complete-modulus",
            Theorem::PartialModuli => "partial-moduli",
            Theorem::Lipschitz => "lipschitz",
            Theorem::C1 => "c1",
            Theorem::PeetreK => "peetre-k",
        }
    }

    /// Whether the bound involves a grid-estimated modulus.
    pub fn uses_modulus(self) -> bool {
        matches!(self, Theorem::CompleteModulus | Theorem::PartialModuli)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::param(format!("unknown theorem {s:?}")))
    }
}

/// Constants of `|f(s,t) - f(x,y)| <= M |s-x|^a1 |t-y|^a2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzSpec {
    pub m: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl LipschitzSpec {
    pub fn new(m: f64, alpha1: f64, alpha2: f64) -> Result<Self> {
        let unit = |a: f64| a > 0.0 && a <= 1.0;
        if !(m > 0.0 && m.is_finite()) || !unit(alpha1) || !unit(alpha2) {
            return Err(Error::param(format!(
                "Lipschitz constants need M > 0 and exponents in (0,1], got M={m}, a1={alpha1}, a2={alpha2}"
            )));
        }
        Ok(Self { m, alpha1, alpha2 })
    }

    /// Checks the increment condition over all pairs of a `points x points` grid.
    pub fn verify(&self, f: &TargetFunction, points: usize) -> Result<()> {
        if points < 2 {
            return Err(Error::param(
                "Lipschitz verification needs at least 2 points per axis",
            ));
        }
        let g = points - 1;
        let pts = unit_grid(g);
        let vals: Vec<f64> = pts
            .iter()
            .flat_map(|&x| pts.iter().map(move |&y| (x, y)))
            .map(|(x, y)| f.eval(x, y).map_err(Error::from))
            .collect::<Result<_>>()?;
        let px: Vec<f64> = pts.iter().map(|d| self.m * d.powf(self.alpha1)).collect();
        let py: Vec<f64> = pts.iter().map(|d| d.powf(self.alpha2)).collect();
        let worst = (0..points)
            .into_par_iter()
            .map(|i| {
                let mut worst: Option<(f64, [usize; 4])> = None;
                for j in 0..points {
                    let v = vals[i * points + j];
                    for i2 in 0..points {
                        let cx = px[i.abs_diff(i2)];
                        let row = &vals[i2 * points..(i2 + 1) * points];
                        for (j2, w) in row.iter().enumerate() {
                            let excess = (v - w).abs() - cx * py[j.abs_diff(j2)];
                            if excess > BOUND_TOL && worst.is_none_or(|(e, _)| excess > e) {
                                worst = Some((excess, [i, j, i2, j2]));
                            }
                        }
                    }
                }
                worst
            })
            .reduce(
                || None,
                |a, b| match (a, b) {
                    (Some(x), Some(y)) => Some(if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                        y
                    } else {
                        x
                    }),
                    (x, None) => x,
                    (None, y) => y,
                },
            );
        match worst {
            None => Ok(()),
            Some((excess, [i, j, i2, j2])) => Err(Error::Hypothesis {
                theorem: Theorem::Lipschitz.id().into(),
                reason: format!(
                    "{} violates M={}, a1={}, a2={} at ({}, {}) vs ({}, {}) by {excess:.3e}",
                    f.name(),
                    self.m,
                    self.alpha1,
                    self.alpha2,
                    pts[i],
                    pts[j],
                    pts[i2],
                    pts[j2]
                ),
            }),
        }
    }

    /// `M delta_n^{a1/2} delta_m^{a2/2}`.
    pub fn bound(&self, delta_n: f64, delta_m: f64) -> f64 {
        self.m * delta_n.powf(self.alpha1 / 2.0) * delta_m.powf(self.alpha2 / 2.0)
    }

    /// `M delta_n^{a1} delta_m^{a2}`, the exponent reading produced by Hölder.
    pub fn bound_variant(&self, delta_n: f64, delta_m: f64) -> f64 {
        self.m * delta_n.powf(self.alpha1) * delta_m.powf(self.alpha2)
    }
}

/// `delta_n^2 = p1^{n-1}/[n] (x - x^2)`.
pub fn delta_n_sq<T: Scalar>(params: &BiParams<T>, x: &T) -> Result<T> {
    uni_central_moment(2, params.n, x, &params.pq1)
}

/// `delta_m^2 = p2^{m-1}/[m] (y - y^2)`.
pub fn delta_m_sq<T: Scalar>(params: &BiParams<T>, y: &T) -> Result<T> {
    uni_central_moment(2, params.m, y, &params.pq2)
}

pub fn delta_nm_sq<T: Scalar>(params: &BiParams<T>, x: &T, y: &T) -> Result<T> {
    Ok(delta_n_sq(params, x)? + delta_m_sq(params, y)?)
}

pub fn delta_n(params: &BiParams, x: f64) -> Result<f64> {
    Ok(delta_n_sq(params, &x)?.max(0.0).sqrt())
}

pub fn delta_m(params: &BiParams, y: f64) -> Result<f64> {
    Ok(delta_m_sq(params, &y)?.max(0.0).sqrt())
}

pub fn delta_nm(params: &BiParams, x: f64, y: f64) -> Result<f64> {
    Ok(delta_nm_sq(params, &x, &y)?.max(0.0).sqrt())
}

/// `1/2 max(delta_n^2, delta_m^2)`, the argument scale of the K-functional bound.
pub fn delta_k(params: &BiParams, x: f64, y: f64) -> Result<f64> {
    Ok(0.5
        * delta_n_sq(params, &x)?
            .max(delta_m_sq(params, &y)?)
            .max(0.0))
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Error grid resolution `G`; `(G+1)^2` nodes.
    pub grid: usize,
    pub modulus_grid: usize,
    pub smoothing: Vec<f64>,
    pub k_grid: usize,
    /// Resolution for sup-norms of first partials.
    pub derivative_grid: usize,
    /// Step for finite-difference partials of functions without analytic ones.
    pub fd_step: f64,
    pub lipschitz_points: usize,
    /// Replaces the constants a corpus function registers.
    pub lipschitz: Option<LipschitzSpec>,
    /// Accept functions without registered partials for the C1 bound.
    pub assume_c1: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            grid: 50,
            modulus_grid: 200,
            smoothing: DEFAULT_FAMILY.to_vec(),
            k_grid: DEFAULT_K_GRID,
            derivative_grid: 200,
            fd_step: 1e-5,
            lipschitz_points: 60,
            lipschitz: None,
            assume_c1: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCertificate {
    pub theorem: Theorem,
    pub function: String,
    pub n: u32,
    pub m: u32,
    /// Grid sup of `|B f - f|`.
    pub lhs: f64,
    /// Bound with sup-grid `delta` values.
    pub rhs: f64,
    /// [`Self::rhs`] with moduli taken at `2 delta`; equal to `rhs` otherwise.
    pub rhs_envelope: f64,
    /// Second reading of the bound, where the statement admits one.
    pub rhs_variant: Option<f64>,
    /// `rhs_envelope - lhs`.
    pub margin: f64,
    /// Every node satisfies its local envelope bound.
    pub pointwise_pass: bool,
    /// `lhs <= rhs_envelope`.
    pub uniform_pass: bool,
    /// Both checks hold without the envelope.
    pub strict_pass: bool,
    /// Both checks hold for the variant bound.
    pub variant_pass: Option<bool>,
    /// Node with the smallest local margin.
    pub worst_point: (f64, f64),
    pub worst_margin: f64,
    pub pass: bool,
}

impl BoundCertificate {
    /// The worst node when the certificate fails.
    pub fn counterexample(&self) -> Option<(f64, f64)> {
        (!self.pass).then_some(self.worst_point)
    }
}

/// `|B f - f|` and the squared `delta` values on the error grid.
struct ErrorField {
    pts: Vec<f64>,
    err: Vec<f64>,
    dx2: Vec<f64>,
    dy2: Vec<f64>,
}

/// The three readings of a bound at one pair `(delta_n^2, delta_m^2)`.
struct Rhs {
    primary: f64,
    envelope: f64,
    variant: Option<f64>,
}

/// Certifies bounds for one function, caching its moduli, norms and
/// smoothing terms across degrees and schedules.
pub struct Certifier<'a> {
    f: &'a TargetFunction,
    opts: CertifyOptions,
    samples: OnceLock<Result<Vec<f64>, String>>,
    complete: OnceLock<ModulusCurve>,
    partial_x: OnceLock<ModulusCurve>,
    partial_y: OnceLock<ModulusCurve>,
    k: OnceLock<Result<KSurrogate, String>>,
    grad: OnceLock<Result<(f64, f64), String>>,
    lipschitz: OnceLock<Result<LipschitzSpec, String>>,
}

impl<'a> Certifier<'a> {
    pub fn new(f: &'a TargetFunction, opts: CertifyOptions) -> Self {
        Self {
            f,
            opts,
            samples: OnceLock::new(),
            complete: OnceLock::new(),
            partial_x: OnceLock::new(),
            partial_y: OnceLock::new(),
            k: OnceLock::new(),
            grad: OnceLock::new(),
            lipschitz: OnceLock::new(),
        }
    }

    pub fn function(&self) -> &TargetFunction {
        self.f
    }

    pub fn options(&self) -> &CertifyOptions {
        &self.opts
    }

    fn samples(&self) -> Result<&[f64]> {
        self.samples
            .get_or_init(|| sample(self.f, self.opts.modulus_grid).map_err(|e| e.to_string()))
            .as_deref()
            .map_err(|e| Error::domain(e.clone()))
    }

    pub fn modulus_curve(&self, direction: Direction) -> Result<&ModulusCurve> {
        let cell = match direction {
            Direction::Complete => &self.complete,
            Direction::PartialX => &self.partial_x,
            Direction::PartialY => &self.partial_y,
        };
        if let Some(c) = cell.get() {
            return Ok(c);
        }
        let s = self.samples()?;
        Ok(cell.get_or_init(|| ModulusCurve::from_samples(s, self.opts.modulus_grid, direction)))
    }

    pub fn k_surrogate(&self) -> Result<&KSurrogate> {
        self.k
            .get_or_init(|| {
                let s = if self.opts.k_grid == self.opts.modulus_grid {
                    self.samples().map(<[f64]>::to_vec)
                } else {
                    sample(self.f, self.opts.k_grid)
                };
                s.and_then(|s| KSurrogate::from_samples(&s, self.opts.k_grid, &self.opts.smoothing))
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| Error::domain(e.clone()))
    }

    /// `(||f_x||, ||f_y||)` over the derivative grid.
    pub fn gradient_norms(&self) -> Result<(f64, f64)> {
        let r = self.grad.get_or_init(|| {
            let f = self.f;
            let analytic = f.has_gradient();
            if !analytic && !self.opts.assume_c1 {
                return Err(format!(
                    "{} has no registered partial derivatives",
                    f.name()
                ));
            }
            let pts = unit_grid(self.opts.derivative_grid);
            let mut nx = 0.0f64;
            let mut ny = 0.0f64;
            for &x in &pts {
                for &y in &pts {
                    let (gx, gy) = match f.gradient(x, y) {
                        Some(g) => g,
                        None => f
                            .fd_gradient(x, y, self.opts.fd_step)
                            .map_err(|e| e.to_string())?,
                    };
                    nx = nx.max(gx.abs());
                    ny = ny.max(gy.abs());
                }
            }
            Ok((nx, ny))
        });
        r.clone().map_err(|reason| Error::Hypothesis {
            theorem: Theorem::C1.id().into(),
            reason,
        })
    }

    /// The registered (or overriding) constants, after grid verification.
    pub fn lipschitz_spec(&self) -> Result<LipschitzSpec> {
        let r = self.lipschitz.get_or_init(|| {
            let spec = self
                .opts
                .lipschitz
                .or_else(|| self.f.lipschitz_claim())
                .ok_or_else(|| format!("{} registers no Lipschitz constants", self.f.name()))?;
            spec.verify(self.f, self.opts.lipschitz_points)
                .map_err(|e| match e {
                    Error::Hypothesis { reason, .. } => reason,
                    other => other.to_string(),
                })?;
            Ok(spec)
        });
        r.clone().map_err(|reason| Error::Hypothesis {
            theorem: Theorem::Lipschitz.id().into(),
            reason,
        })
    }

    /// Confirms `f` belongs to the class the theorem assumes.
    pub fn check_hypothesis(&self, theorem: Theorem) -> Result<()> {
        match theorem {
            Theorem::CompleteModulus | Theorem::PartialModuli | Theorem::PeetreK => Ok(()),
            Theorem::Lipschitz => self.lipschitz_spec().map(|_| ()),
            Theorem::C1 => self.gradient_norms().map(|_| ()),
        }
    }

    fn error_field(&self, params: &BiParams) -> Result<ErrorField> {
        let op = BiOperator::new(params.clone())?;
        let table = op.tabulate(|s, t| Ok(self.f.eval(s, t)?))?;
        let pts = unit_grid(self.opts.grid);
        let dx2 = pts
            .iter()
            .map(|x| delta_n_sq(params, x))
            .collect::<Result<Vec<_>>>()?;
        let dy2 = pts
            .iter()
            .map(|y| delta_m_sq(params, y))
            .collect::<Result<Vec<_>>>()?;
        let rows: Vec<Vec<f64>> = pts
            .par_iter()
            .map(|&x| {
                pts.iter()
                    .map(|&y| {
                        let (wx, wy) = op.weights(&x, &y)?;
                        Ok((op.apply_tabulated(&wx, &wy, &table) - self.f.eval(x, y)?).abs())
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        Ok(ErrorField {
            err: rows.concat(),
            pts,
            dx2,
            dy2,
        })
    }

    fn rhs(&self, theorem: Theorem, dx2: f64, dy2: f64) -> Result<Rhs> {
        let (dn, dm) = (dx2.max(0.0).sqrt(), dy2.max(0.0).sqrt());
        Ok(match theorem {
            Theorem::CompleteModulus => {
                let w = self.modulus_curve(Direction::Complete)?;
                let d = (dx2 + dy2).max(0.0).sqrt();
                Rhs {
                    primary: 2.0 * w.value(d),
                    envelope: 2.0 * w.value(2.0 * d),
                    variant: None,
                }
            }
            Theorem::PartialModuli => {
                let w1 = self.modulus_curve(Direction::PartialX)?;
                let w2 = self.modulus_curve(Direction::PartialY)?;
                Rhs {
                    primary: w1.value(dn) + w2.value(dm),
                    envelope: w1.value(2.0 * dn) + w2.value(2.0 * dm),
                    variant: Some(2.0 * w1.value(dn) + 2.0 * w2.value(dm)),
                }
            }
            Theorem::Lipschitz => {
                let spec = self.lipschitz_spec()?;
                let b = spec.bound(dn, dm);
                Rhs {
                    primary: b,
                    envelope: b,
                    variant: Some(spec.bound_variant(dn, dm)),
                }
            }
            Theorem::C1 => {
                let (gx, gy) = self.gradient_norms()?;
                let b = gx * dn + gy * dm;
                Rhs {
                    primary: b,
                    envelope: b,
                    variant: None,
                }
            }
            Theorem::PeetreK => {
                let k = self.k_surrogate()?;
                let delta = 0.5 * dx2.max(dy2).max(0.0);
                let b = 2.0 * k.value(delta / 2.0);
                Rhs {
                    primary: b,
                    envelope: b,
                    variant: None,
                }
            }
        })
    }

    fn certificate(
        &self,
        theorem: Theorem,
        params: &BiParams,
        field: &ErrorField,
    ) -> Result<BoundCertificate> {
        self.check_hypothesis(theorem)?;
        let g1 = field.pts.len();
        let mut lhs = 0.0f64;
        let mut pointwise_pass = true;
        let mut strict_pointwise = true;
        let mut variant_pointwise = true;
        let mut worst = (f64::INFINITY, (0.0, 0.0));
        for i in 0..g1 {
            for j in 0..g1 {
                let e = field.err[i * g1 + j];
                lhs = lhs.max(e);
                let r = self.rhs(theorem, field.dx2[i], field.dy2[j])?;
                pointwise_pass &= e <= r.envelope + BOUND_TOL;
                strict_pointwise &= e <= r.primary + BOUND_TOL;
                if let Some(v) = r.variant {
                    variant_pointwise &= e <= v + BOUND_TOL;
                }
                let margin = r.envelope - e;
                if margin < worst.0 {
                    worst = (margin, (field.pts[i], field.pts[j]));
                }
            }
        }
        if lhs.is_nan() {
            return Err(Error::domain(format!(
                "{} produced a non-finite error",
                self.f.name()
            )));
        }
        let sup_dx2 = field.dx2.iter().cloned().fold(0.0, f64::max);
        let sup_dy2 = field.dy2.iter().cloned().fold(0.0, f64::max);
        let u = self.rhs(theorem, sup_dx2, sup_dy2)?;
        let uniform_pass = lhs <= u.envelope + BOUND_TOL;
        let strict_pass = strict_pointwise && lhs <= u.primary + BOUND_TOL;
        let variant_pass = u.variant.map(|v| variant_pointwise && lhs <= v + BOUND_TOL);
        Ok(BoundCertificate {
            theorem,
            function: self.f.name().to_string(),
            n: params.n,
            m: params.m,
            lhs,
            rhs: u.primary,
            rhs_envelope: u.envelope,
            rhs_variant: u.variant,
            margin: u.envelope - lhs,
            pointwise_pass,
            uniform_pass,
            strict_pass,
            variant_pass,
            worst_point: worst.1,
            worst_margin: worst.0,
            pass: pointwise_pass && uniform_pass,
        })
    }

    /// Certificates for several theorems sharing one error field.
    pub fn certify_all(
        &self,
        theorems: &[Theorem],
        params: &BiParams,
    ) -> Result<Vec<Result<BoundCertificate>>> {
        let field = self.error_field(params)?;
        Ok(theorems
            .iter()
            .map(|&t| self.certificate(t, params, &field))
            .collect())
    }

    pub fn certify(&self, theorem: Theorem, params: &BiParams) -> Result<BoundCertificate> {
        self.check_hypothesis(theorem)?;
        let field = self.error_field(params)?;
        self.certificate(theorem, params, &field)
    }
}

/// One certificate; see [`Certifier`] for batches.
pub fn certify_bound(
    theorem: Theorem,
    f: &TargetFunction,
    params: &BiParams,
    opts: &CertifyOptions,
) -> Result<BoundCertificate> {
    Certifier::new(f, opts.clone()).certify(theorem, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pq_core::PQPair;
    use crate::schedule::ParamSchedule;
    use crate::target::Builtin;

    fn params(n: u32) -> BiParams {
        let s = ParamSchedule::rational();
        BiParams::new(s.pair(n).unwrap(), s.pair(n).unwrap(), n, n).unwrap()
    }

    fn small_opts() -> CertifyOptions {
        CertifyOptions {
            grid: 20,
            modulus_grid: 60,
            k_grid: 60,
            derivative_grid: 60,
            lipschitz_points: 20,
            ..Default::default()
        }
    }

    #[test]
    fn delta_examples() {
        let pq = PQPair::new(1.0, 0.8).unwrap();
        let p = BiParams::new(pq, pq, 10, 10).unwrap();
        assert_eq!(delta_nm(&p, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(delta_n(&p, 1.0).unwrap(), 0.0);
        let b10: f64 = (0..10).map(|i| 0.8f64.powi(i)).sum();
        assert!((delta_nm(&p, 0.5, 0.5).unwrap() - (0.5 / b10).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constant_and_product_have_zero_error() {
        for b in [Builtin::Const1, Builtin::ProdXY] {
            let f = TargetFunction::builtin(b);
            let c = Certifier::new(&f, small_opts());
            for r in c
                .certify_all(&[Theorem::CompleteModulus, Theorem::C1], &params(8))
                .unwrap()
            {
                let cert = r.unwrap();
                assert!(cert.lhs < 1e-13, "{cert:?}");
                assert!(cert.pass);
            }
        }
    }

    #[test]
    fn hypothesis_errors_are_typed() {
        let vee = TargetFunction::builtin(Builtin::Vee);
        let c = Certifier::new(&vee, small_opts());
        let e = c.certify(Theorem::C1, &params(4)).unwrap_err();
        assert!(matches!(e, Error::Hypothesis { ref theorem, .. } if theorem == "c1"));
        let e = c.certify(Theorem::Lipschitz, &params(4)).unwrap_err();
        assert!(matches!(e, Error::Hypothesis { ref theorem, .. } if theorem == "lipschitz"));
        let lip = TargetFunction::builtin(Builtin::LipHalf);
        let e = Certifier::new(&lip, small_opts())
            .certify(Theorem::Lipschitz, &params(4))
            .unwrap_err();
        assert!(e.to_string().contains("violates"), "{e}");
    }

    #[test]
    fn quad_passes_all_applicable() {
        let f = TargetFunction::builtin(Builtin::Quad);
        let c = Certifier::new(&f, small_opts());
        let ts = [
            Theorem::CompleteModulus,
            Theorem::PartialModuli,
            Theorem::C1,
            Theorem::PeetreK,
        ];
        for r in c.certify_all(&ts, &params(8)).unwrap() {
            let cert = r.unwrap();
            assert!(cert.pass, "{cert:?}");
            assert!(cert.lhs > 0.0);
        }
    }

    #[test]
    fn lipschitz_spec_validation() {
        assert!(LipschitzSpec::new(1.0, 0.5, 1.0).is_ok());
        assert!(LipschitzSpec::new(0.0, 0.5, 1.0).is_err());
        assert!(LipschitzSpec::new(1.0, 1.5, 1.0).is_err());
        let s = LipschitzSpec::new(2.0, 1.0, 1.0).unwrap();
        assert_eq!(s.bound(0.25, 0.25), 2.0 * 0.5 * 0.5);
        assert_eq!(s.bound_variant(0.25, 0.25), 2.0 * 0.25 * 0.25);
    }
}
