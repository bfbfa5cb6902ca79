//! Upper bound for the K-functional from a family of Gaussian mollifications.

use crate::error::{Error, Result};
use crate::target::TargetFunction;

use super::modulus::sample;

pub const DEFAULT_FAMILY: [f64; 4] = [0.02, 0.05, 0.1, 0.2];
pub const DEFAULT_K_GRID: usize = 200;

/// One candidate `g = f * phi_sigma` with its grid norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KTerm {
    pub sigma: f64,
    /// `||f - g||`
    pub distance: f64,
    /// `||g|| + ||g_x|| + ||g_y|| + ||g_xx|| + ||g_yy||`
    pub c2_norm: f64,
}

#[derive(Debug, Clone)]
pub struct KSurrogate {
    grid: usize,
    terms: Vec<KTerm>,
}

impl KSurrogate {
    pub fn build(f: &TargetFunction, family: &[f64], grid: usize) -> Result<Self> {
        Self::from_samples(&sample(f, grid)?, grid, family)
    }

    pub fn from_samples(values: &[f64], grid: usize, family: &[f64]) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::param("smoothing family is empty"));
        }
        if let Some(s) = family.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::param(format!("smoothing scale {s} is not positive")));
        }
        if grid < 3 {
            return Err(Error::param(
                "K-functional grid needs at least 4 points per axis",
            ));
        }
        let terms = family
            .iter()
            .map(|&sigma| term(values, grid, sigma))
            .collect();
        Ok(Self { grid, terms })
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn terms(&self) -> &[KTerm] {
        &self.terms
    }

    /// `min_sigma (||f - g_sigma|| + delta ||g_sigma||_{C^2})`.
    pub fn value(&self, delta: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.distance + delta * t.c2_norm)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn k_surrogate(f: &TargetFunction, delta: f64, family: &[f64]) -> Result<f64> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::param(format!(
            "delta must be finite and nonnegative, got {delta}"
        )));
    }
    Ok(KSurrogate::build(f, family, DEFAULT_K_GRID)?.value(delta))
}

fn term(values: &[f64], grid: usize, sigma: f64) -> KTerm {
    let g1 = grid + 1;
    let kernel = gaussian(sigma, grid);
    let mut g = vec![0.0; g1 * g1];
    let mut line = vec![0.0; g1];
    let mut out = vec![0.0; g1];
    // along y (contiguous), then along x
    for i in 0..g1 {
        line.copy_from_slice(&values[i * g1..(i + 1) * g1]);
        convolve(&line, &kernel, &mut out);
        g[i * g1..(i + 1) * g1].copy_from_slice(&out);
    }
    for j in 0..g1 {
        for i in 0..g1 {
            line[i] = g[i * g1 + j];
        }
        convolve(&line, &kernel, &mut out);
        for i in 0..g1 {
            g[i * g1 + j] = out[i];
        }
    }
    let h = 1.0 / grid as f64;
    let at = |i: usize, j: usize| g[i * g1 + j];
    let mut norms = [0.0f64; 5];
    let mut distance = 0.0f64;
    for i in 0..g1 {
        for j in 0..g1 {
            distance = distance.max((values[i * g1 + j] - at(i, j)).abs());
            let (gx, gxx) = derivs(|k| at(k, j), i, grid, h);
            let (gy, gyy) = derivs(|k| at(i, k), j, grid, h);
            for (n, v) in norms.iter_mut().zip([at(i, j), gx, gy, gxx, gyy]) {
                *n = n.max(v.abs());
            }
        }
    }
    KTerm {
        sigma,
        distance,
        c2_norm: norms.iter().sum(),
    }
}

fn gaussian(sigma: f64, grid: usize) -> Vec<f64> {
    let s = sigma * grid as f64;
    let half = ((4.0 * s).ceil() as usize).clamp(1, grid);
    let raw: Vec<f64> = (0..=2 * half)
        .map(|l| {
            let d = l as f64 - half as f64;
            (-0.5 * (d / s) * (d / s)).exp()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Convolution with point reflection at both ends, which keeps affine data fixed.
fn convolve(line: &[f64], kernel: &[f64], out: &mut [f64]) {
    let last = line.len() as i64 - 1;
    let half = (kernel.len() / 2) as i64;
    let ext = |i: i64| -> f64 {
        if i < 0 {
            2.0 * line[0] - line[(-i) as usize]
        } else if i > last {
            2.0 * line[last as usize] - line[(2 * last - i) as usize]
        } else {
            line[i as usize]
        }
    };
    for (i, o) in out.iter_mut().enumerate() {
        *o = kernel
            .iter()
            .enumerate()
            .map(|(l, w)| w * ext(i as i64 + l as i64 - half))
            .sum();
    }
}

/// First and second differences, one-sided second order at the ends.
fn derivs(v: impl Fn(usize) -> f64, i: usize, grid: usize, h: f64) -> (f64, f64) {
    if i == 0 {
        (
            (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h),
            (2.0 * v(0) - 5.0 * v(1) + 4.0 * v(2) - v(3)) / (h * h),
        )
    } else if i == grid {
        let n = grid;
        (
            (3.0 * v(n) - 4.0 * v(n - 1) + v(n - 2)) / (2.0 * h),
            (2.0 * v(n) - 5.0 * v(n - 1) + 4.0 * v(n - 2) - v(n - 3)) / (h * h),
        )
    } else {
        (
            (v(i + 1) - v(i - 1)) / (2.0 * h),
            (v(i + 1) - 2.0 * v(i) + v(i - 1)) / (h * h),
        )
    }
}
