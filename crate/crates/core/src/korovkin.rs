//! Sup-error sweeps of the bivariate operator along parameter schedules.

use rayon::prelude::*;

use crate::bivariate::{unit_grid, BiMoment, BiOperator, BiParams};
use crate::error::{Error, Result};
use crate::schedule::ParamSchedule;
use crate::target::TargetFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct KorovkinRow {
    pub n: u32,
    pub m: u32,
    /// `NaN` when the row was skipped.
    pub sup_error: f64,
    /// Sup-errors on `1, s, t, st, s^2, t^2`, in [`BiMoment::ALL`] order.
    pub test_errors: [f64; 6],
    pub warning: Option<String>,
}

#[derive(Debug, Clone)]
pub struct KorovkinTable {
    pub function: String,
    pub schedule_x: String,
    pub schedule_y: String,
    pub grid: usize,
    pub rows: Vec<KorovkinRow>,
}

/// Sup over a `(G+1) x (G+1)` grid of `|B f - f|` and of the six test errors,
/// for each `(n, m)`.
pub fn korovkin_experiment(
    f: &TargetFunction,
    sched_x: &ParamSchedule,
    sched_y: &ParamSchedule,
    degrees: &[(u32, u32)],
    grid: usize,
) -> Result<KorovkinTable> {
    if grid < 10 {
        return Err(Error::param(format!(
            "grid resolution {grid} gives fewer than 11 points per axis"
        )));
    }
    let mut rows = Vec::with_capacity(degrees.len());
    for &(n, m) in degrees {
        let mut warnings = Vec::new();
        for s in [sched_x, sched_y] {
            if s.is_degenerate() {
                warnings.push(format!("schedule {} does not tend to (1,1)", s.name()));
            }
        }
        let pairs = sched_x.pair(n).and_then(|a| Ok((a, sched_y.pair(m)?)));
        let (pq1, pq2) = match pairs {
            Ok(p) => p,
            Err(e) => {
                warnings.push(format!("skipped: {e}"));
                rows.push(KorovkinRow {
                    n,
                    m,
                    sup_error: f64::NAN,
                    test_errors: [f64::NAN; 6],
                    warning: Some(warnings.join("; ")),
                });
                continue;
            }
        };
        let op = BiOperator::new(BiParams::new(pq1, pq2, n, m)?)?;
        let (sup_error, test_errors) = sweep(&op, f, grid)?;
        rows.push(KorovkinRow {
            n,
            m,
            sup_error,
            test_errors,
            warning: (!warnings.is_empty()).then(|| warnings.join("; ")),
        });
    }
    Ok(KorovkinTable {
        function: f.name().to_string(),
        schedule_x: sched_x.name(),
        schedule_y: sched_y.name(),
        grid,
        rows,
    })
}

fn sweep(op: &BiOperator, f: &TargetFunction, grid: usize) -> Result<(f64, [f64; 6])> {
    let table = op.tabulate(|s, t| Ok(f.eval(s, t)?))?;
    let tests: Vec<Vec<f64>> = BiMoment::ALL
        .iter()
        .map(|w| op.tabulate(|s, t| Ok(w.eval(&s, &t))))
        .collect::<Result<_>>()?;
    let pts = unit_grid(grid);
    let per_point: Vec<[f64; 7]> = pts
        .par_iter()
        .flat_map_iter(|&x| pts.iter().map(move |&y| (x, y)))
        .map(|(x, y)| {
            let (wx, wy) = op.weights(&x, &y)?;
            let mut out = [0.0; 7];
            out[0] = (op.apply_tabulated(&wx, &wy, &table) - f.eval(x, y)?).abs();
            for (i, (w, t)) in BiMoment::ALL.iter().zip(&tests).enumerate() {
                out[i + 1] = (op.apply_tabulated(&wx, &wy, t) - w.eval(&x, &y)).abs();
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut sup = [0.0f64; 7];
    for row in &per_point {
        for (s, v) in sup.iter_mut().zip(row) {
            *s = if v.is_nan() { f64::NAN } else { s.max(*v) };
        }
    }
    let mut tests_sup = [0.0; 6];
    tests_sup.copy_from_slice(&sup[1..]);
    Ok((sup[0], tests_sup))
}
