//! Scaled central moments and the first-order asymptotics of `B_{n,n} f - f`.

use rayon::prelude::*;

use crate::bivariate::{BiOperator, BiParams};
use crate::error::{Error, Result};
use crate::pq_core::pq_integer;
use crate::schedule::ParamSchedule;
use crate::target::{SecondPartials, TargetFunction};
use crate::univariate::uni_central_moment;

/// Step for finite-difference second partials in traces.
pub const FD_STEP: f64 = 1e-4;

/// `16, 32, ..., 2048`.
pub fn default_degrees() -> Vec<u32> {
    (4..=11).map(|k| 1u32 << k).collect()
}

fn check_degrees(schedule: &ParamSchedule, degrees: &[u32]) -> Result<()> {
    if degrees.is_empty() {
        return Err(Error::param("degree list is empty"));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("degrees must be strictly increasing"));
    }
    if degrees[0] < schedule.first_degree() {
        return Err(Error::param(format!(
            "schedule {} starts at degree {}, got {}",
            schedule.name(),
            schedule.first_degree(),
            degrees[0]
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentLimitTrace {
    pub order: u32,
    pub schedule: ParamSchedule,
    pub x: f64,
    pub degrees: Vec<u32>,
    /// `[n] mu_2` or `[n]^2 mu_4`.
    pub scaled_values: Vec<f64>,
    /// `a(x - x^2)` or `3a x^2 (1-x)^2`.
    pub predicted_limit: f64,
    /// `a(x - x^2)` or `3a^2 x^2 (1-x)^2`, the limit of the assembled moment.
    pub refined_limit: f64,
    pub abs_errors: Vec<f64>,
}

pub fn scaled_central_moment_limit_check(
    order: u32,
    schedule: &ParamSchedule,
    x: f64,
    degrees: &[u32],
) -> Result<MomentLimitTrace> {
    if order != 2 && order != 4 {
        return Err(Error::domain(format!(
            "central moment order must be 2 or 4, got {order}"
        )));
    }
    check_degrees(schedule, degrees)?;
    let a = schedule.declared_a();
    let w = x * (1.0 - x);
    let (predicted_limit, refined_limit) = if order == 2 {
        (a * w, a * w)
    } else {
        (3.0 * a * w * w, 3.0 * a * a * w * w)
    };
    let scaled_values = degrees
        .iter()
        .map(|&n| {
            let pq = schedule.pair(n)?;
            let scale = pq_integer(n, &pq).powi(order as i32 / 2);
            Ok(scale * uni_central_moment(order, n, &x, &pq)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let abs_errors = scaled_values
        .iter()
        .map(|v| (v - predicted_limit).abs())
        .collect();
    Ok(MomentLimitTrace {
        order,
        schedule: schedule.clone(),
        x,
        degrees: degrees.to_vec(),
        scaled_values,
        predicted_limit,
        refined_limit,
        abs_errors,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticTrace {
    pub function: String,
    pub schedule: ParamSchedule,
    pub degrees: Vec<u32>,
    pub point: (f64, f64),
    /// `[n] (B_{n,n} f - f)` at the point.
    pub scaled_values: Vec<f64>,
    /// `a(x - x^2) f_xx / 2 + a(y - y^2) f_yy / 2`.
    pub predicted_limit: f64,
    pub finite_differences: bool,
}

impl AsymptoticTrace {
    /// Two-point extrapolation `(n2 T2 - n1 T1) / (n2 - n1)` from the last two degrees.
    pub fn richardson(&self) -> Option<f64> {
        let k = self.degrees.len();
        if k < 2 {
            return None;
        }
        let (n1, n2) = (self.degrees[k - 2] as f64, self.degrees[k - 1] as f64);
        let (t1, t2) = (self.scaled_values[k - 2], self.scaled_values[k - 1]);
        Some((n2 * t2 - n1 * t1) / (n2 - n1))
    }

    pub fn abs_errors(&self) -> Vec<f64> {
        self.scaled_values
            .iter()
            .map(|v| (v - self.predicted_limit).abs())
            .collect()
    }
}

/// Trace of `[n] (B_{n,n} f - f)(x, y)` along the schedule, used on both axes.
/// Without analytic second partials, `allow_fd` selects central differences.
pub fn voronovskaja_trace(
    f: &TargetFunction,
    schedule: &ParamSchedule,
    point: (f64, f64),
    degrees: &[u32],
    allow_fd: bool,
) -> Result<AsymptoticTrace> {
    check_degrees(schedule, degrees)?;
    let (x, y) = point;
    for v in [x, y] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(format!(
                "point ({x}, {y}) outside the unit square"
            )));
        }
    }
    let (d2, finite_differences): (SecondPartials, bool) = match f.second_partials(x, y) {
        Some(d) => (d, false),
        None if allow_fd => (f.fd_second_partials(x, y, FD_STEP)?, true),
        None => {
            return Err(Error::Hypothesis {
                theorem: "voronovskaja".into(),
                reason: format!("{} has no registered second partials", f.name()),
            })
        }
    };
    let a = schedule.declared_a();
    let wx = x - x * x;
    let wy = y - y * y;
    let predicted_limit = a * wx * d2.xx / 2.0 + a * wy * d2.yy / 2.0;
    let fxy = f.eval(x, y)?;
    let scaled_values = degrees
        .par_iter()
        .map(|&n| {
            let pq = schedule.pair(n)?;
            let op = BiOperator::new(BiParams::new(pq, pq, n, n)?)?;
            let table = op.tabulate(|s, t| Ok(f.eval(s, t)?))?;
            let (wxs, wys) = op.weights(&x, &y)?;
            Ok(pq_integer(n, &pq) * (op.apply_tabulated(&wxs, &wys, &table) - fxy))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(AsymptoticTrace {
        function: f.name().to_string(),
        schedule: schedule.clone(),
        degrees: degrees.to_vec(),
        point,
        scaled_values,
        predicted_limit,
        finite_differences,
    })
}
