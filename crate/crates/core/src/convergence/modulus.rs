//! Grid estimates of the complete and partial moduli of continuity.
//!
//! A [`ModulusCurve`] scans every lattice offset once and keeps the running
//! maximum by distance, so any number of `delta` queries cost a binary search.

use rayon::prelude::*;

use crate::bivariate::{unit_grid, Axis};
use crate::error::{Error, Result};
use crate::target::TargetFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Complete,
    PartialX,
    PartialY,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Complete => "complete",
            Direction::PartialX => "partial-x",
            Direction::PartialY => "partial-y",
        }
    }
}

impl From<Axis> for Direction {
    fn from(a: Axis) -> Self {
        match a {
            Axis::X => Direction::PartialX,
            Axis::Y => Direction::PartialY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusEstimate {
    pub delta: f64,
    pub value: f64,
    pub grid_resolution: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone)]
pub struct ModulusCurve {
    direction: Direction,
    grid: usize,
    dist: Vec<f64>,
    value: Vec<f64>,
}

/// `f` on the `(G+1) x (G+1)` grid, row-major with `x` outer.
pub fn sample(f: &TargetFunction, grid: usize) -> Result<Vec<f64>> {
    let pts = unit_grid(grid);
    let rows: Vec<Vec<f64>> = pts
        .par_iter()
        .map(|&x| {
            pts.iter()
                .map(|&y| f.eval(x, y).map_err(Error::from))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

fn check_delta(delta: f64) -> Result<()> {
    if delta >= 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "delta must be finite and nonnegative, got {delta}"
        )))
    }
}

impl ModulusCurve {
    pub fn build(f: &TargetFunction, direction: Direction, grid: usize) -> Result<Self> {
        Ok(Self::from_samples(&sample(f, grid)?, grid, direction))
    }

    /// `values` as produced by [`sample`].
    pub fn from_samples(values: &[f64], grid: usize, direction: Direction) -> Self {
        let g1 = grid + 1;
        assert_eq!(values.len(), g1 * g1, "sample count does not match grid");
        let (dist, raw): (Vec<f64>, Vec<f64>) = match direction {
            Direction::Complete => complete_scan(values, grid),
            Direction::PartialX | Direction::PartialY => {
                let axis_x = direction == Direction::PartialX;
                let raw: Vec<f64> = (0..g1)
                    .into_par_iter()
                    .map(|d| partial_offset_max(values, g1, d, axis_x))
                    .collect();
                ((0..g1).map(|d| d as f64 / grid as f64).collect(), raw)
            }
        };
        let mut run = 0.0f64;
        let value = raw
            .into_iter()
            .map(|v| {
                run = run.max(v);
                run
            })
            .collect();
        Self {
            direction,
            grid,
            dist,
            value,
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// Largest grid increment over lattice distances `<= delta`.
    pub fn value(&self, delta: f64) -> f64 {
        let idx = self
            .dist
            .partition_point(|&d| d <= delta * (1.0 + 1e-12) + 1e-15);
        if idx == 0 {
            0.0
        } else {
            self.value[idx - 1]
        }
    }

    pub fn estimate(&self, delta: f64) -> Result<ModulusEstimate> {
        check_delta(delta)?;
        Ok(ModulusEstimate {
            delta,
            value: self.value(delta),
            grid_resolution: self.grid,
            direction: self.direction,
        })
    }
}

fn partial_offset_max(v: &[f64], g1: usize, d: usize, axis_x: bool) -> f64 {
    let mut best = 0.0f64;
    if axis_x {
        for i in 0..g1 - d {
            let a = &v[(i + d) * g1..(i + d + 1) * g1];
            let b = &v[i * g1..(i + 1) * g1];
            for (p, q) in a.iter().zip(b) {
                best = best.max((p - q).abs());
            }
        }
    } else {
        for row in v.chunks_exact(g1) {
            for (p, q) in row[d..].iter().zip(row) {
                best = best.max((p - q).abs());
            }
        }
    }
    best
}

/// Max increment per squared lattice distance, over half-plane offsets.
fn complete_scan(v: &[f64], grid: usize) -> (Vec<f64>, Vec<f64>) {
    let g1 = grid + 1;
    let gi = grid as i64;
    let per_di: Vec<Vec<f64>> = (0..g1)
        .into_par_iter()
        .map(|di| {
            let mut out = vec![0.0f64; 2 * g1 - 1];
            let lo = if di == 0 { 0 } else { -gi };
            for dj in lo..=gi {
                let (ja, jb, len) = if dj >= 0 {
                    (dj as usize, 0usize, g1 - dj as usize)
                } else {
                    (0usize, (-dj) as usize, g1 - (-dj) as usize)
                };
                let mut best = 0.0f64;
                for i in 0..g1 - di {
                    let a = &v[(i + di) * g1 + ja..(i + di) * g1 + ja + len];
                    let b = &v[i * g1 + jb..i * g1 + jb + len];
                    for (p, q) in a.iter().zip(b) {
                        best = best.max((p - q).abs());
                    }
                }
                out[(dj + gi) as usize] = best;
            }
            out
        })
        .collect();
    let max_d2 = 2 * grid * grid;
    let mut by_d2: Vec<Option<f64>> = vec![None; max_d2 + 1];
    for (di, row) in per_di.iter().enumerate() {
        let lo = if di == 0 { 0 } else { -gi };
        for dj in lo..=gi {
            let d2 = di * di + (dj * dj) as usize;
            let val = row[(dj + gi) as usize];
            let slot = &mut by_d2[d2];
            *slot = Some(slot.map_or(val, |s: f64| s.max(val)));
        }
    }
    by_d2
        .into_iter()
        .enumerate()
        .filter_map(|(d2, v)| v.map(|v| ((d2 as f64).sqrt() / grid as f64, v)))
        .unzip()
}

/// Complete modulus on a `(G+1)^2` grid; a lower estimate of the true value.
pub fn complete_modulus(f: &TargetFunction, delta: f64, grid: usize) -> Result<ModulusEstimate> {
    check_delta(delta)?;
    ModulusCurve::build(f, Direction::Complete, grid)?.estimate(delta)
}

/// Partial modulus with the other coordinate ranging over the grid.
pub fn partial_modulus(
    f: &TargetFunction,
    axis: Axis,
    delta: f64,
    grid: usize,
) -> Result<ModulusEstimate> {
    check_delta(delta)?;
    ModulusCurve::build(f, axis.into(), grid)?.estimate(delta)
}
