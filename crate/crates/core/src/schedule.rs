//! Parameter schedules `n -> (p_n, q_n)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pq_core::PQPair;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleRule {
    /// `p_n = n/(n+1)`, `q_n = (n-1)/n`.
    Rational,
    /// `p_n = e^{-1/n}`, `q_n = e^{-1/n - 1/n^2}`.
    Exponential,
    /// `p_n = 1`, `q_n = 1 - 1/n`.
    QOnly,
    /// The same pair at every degree. Not an approximation process.
    Fixed { p: f64, q: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSchedule {
    rule: ScheduleRule,
    declared_a: f64,
    declared_b: f64,
}

impl ParamSchedule {
    pub fn rational() -> Self {
        let e = (-1.0f64).exp();
        Self {
            rule: ScheduleRule::Rational,
            declared_a: e,
            declared_b: e,
        }
    }

    pub fn exponential() -> Self {
        let e = (-1.0f64).exp();
        Self {
            rule: ScheduleRule::Exponential,
            declared_a: e,
            declared_b: e,
        }
    }

    pub fn q_only() -> Self {
        Self {
            rule: ScheduleRule::QOnly,
            declared_a: 1.0,
            declared_b: (-1.0f64).exp(),
        }
    }

    pub fn fixed(p: f64, q: f64) -> Result<Self> {
        PQPair::new(p, q)?;
        let lim = |v: f64| if v < 1.0 { 0.0 } else { 1.0 };
        Ok(Self {
            rule: ScheduleRule::Fixed { p, q },
            declared_a: lim(p),
            declared_b: lim(q),
        })
    }

    /// Schedules `i`, `ii`, `iii`.
    pub fn builtin() -> Vec<Self> {
        vec![Self::rational(), Self::exponential(), Self::q_only()]
    }

    pub fn rule(&self) -> ScheduleRule {
        self.rule
    }

    /// Limit of `p_n^n`.
    pub fn declared_a(&self) -> f64 {
        self.declared_a
    }

    /// Limit of `q_n^n`. Diagnostic only.
    pub fn declared_b(&self) -> f64 {
        self.declared_b
    }

    pub fn name(&self) -> String {
        match self.rule {
            ScheduleRule::Rational => "i".into(),
            ScheduleRule::Exponential => "ii".into(),
            ScheduleRule::QOnly => "iii".into(),
            ScheduleRule::Fixed { p, q } => format!("fixed:{p},{q}"),
        }
    }

    /// Smallest degree with an admissible pair.
    pub fn first_degree(&self) -> u32 {
        match self.rule {
            ScheduleRule::Rational | ScheduleRule::QOnly => 2,
            ScheduleRule::Exponential | ScheduleRule::Fixed { .. } => 1,
        }
    }

    /// True when `p_n, q_n` do not tend to 1.
    pub fn is_degenerate(&self) -> bool {
        matches!(self.rule, ScheduleRule::Fixed { .. })
    }

    pub fn raw(&self, n: u32) -> (f64, f64) {
        let nf = n as f64;
        match self.rule {
            ScheduleRule::Rational => (nf / (nf + 1.0), (nf - 1.0) / nf),
            ScheduleRule::Exponential => ((-1.0 / nf).exp(), (-1.0 / nf - 1.0 / (nf * nf)).exp()),
            ScheduleRule::QOnly => (1.0, 1.0 - 1.0 / nf),
            ScheduleRule::Fixed { p, q } => (p, q),
        }
    }

    pub fn pair(&self, n: u32) -> Result<PQPair> {
        if n == 0 {
            return Err(Error::param("degree must be at least 1"));
        }
        let (p, q) = self.raw(n);
        PQPair::new(p, q)
    }

    /// `(p_n^n - a, q_n^n - b)`.
    pub fn limit_residuals(&self, n: u32) -> (f64, f64) {
        let (p, q) = self.raw(n);
        let nf = n as f64;
        (
            (nf * p.ln()).exp() - self.declared_a,
            (nf * q.ln()).exp() - self.declared_b,
        )
    }
}

impl fmt::Display for ParamSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for ParamSchedule {
    type Err = Error;

    /// `i`, `ii`, `iii`, or `fixed:P,Q`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "i" => Ok(Self::rational()),
            "ii" => Ok(Self::exponential()),
            "iii" => Ok(Self::q_only()),
            other => {
                let body = other
                    .strip_prefix("fixed:")
                    .ok_or_else(|| Error::param(format!("unknown schedule {s:?}")))?;
                let (p, q) = body
                    .split_once(',')
                    .ok_or_else(|| Error::param(format!("expected fixed:P,Q, got {s:?}")))?;
                let p: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::param(format!("bad p in {s:?}")))?;
                let q: f64 = q
                    .trim()
                    .parse()
                    .map_err(|_| Error::param(format!("bad q in {s:?}")))?;
                Self::fixed(p, q)
            }
        }
    }
}
