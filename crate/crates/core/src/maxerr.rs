//! Search for `max_x |Delta_n(x)|`.
//!
//! `|Delta_n|` is sampled on a uniform grid, the best sample is refined by
//! golden-section search to a bracket of width `1e-8`, and decay past the
//! right end of the grid is checked at three further points.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gauss::{self, phi};
use crate::oracle::reference_mills;
use crate::tails::{FamilyKind, TailFamily};

pub const DEFAULT_XMIN: f64 = 0.0;
pub const DEFAULT_XMAX: f64 = 20.0;
pub const DEFAULT_STEP: f64 = 1e-3;
const REFINE_WIDTH: f64 = 1e-8;

/// Max errors of the improved exponential family at `n = 0, 1, 2, 3`
/// (two significant digits).
pub const IMPROVED_EXPO_TARGETS: [f64; 4] = [0.00021, 0.000048, 0.000030, 0.000016];

/// Reference Mills ratio and density sampled on a uniform grid, shared by
/// every family and depth searched over it.
#[derive(Debug, Clone)]
pub struct ReferenceGrid {
    xs: Vec<f64>,
    mills: Vec<f64>,
    density: Vec<f64>,
}

impl ReferenceGrid {
    pub fn new(xmin: f64, xmax: f64, step: f64) -> Result<Self> {
        let xs = uniform_grid(xmin, xmax, step)?;
        let mills = xs
            .par_iter()
            .map(|&x| reference_mills(x))
            .collect::<Result<Vec<_>>>()?;
        let density = xs.iter().map(|&x| phi(x)).collect();
        Ok(Self { xs, mills, density })
    }

    /// `[0, 20]` with step `1e-3`.
    pub fn standard() -> Result<Self> {
        Self::new(DEFAULT_XMIN, DEFAULT_XMAX, DEFAULT_STEP)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    /// `Delta_n` at every grid point.
    pub fn deltas(&self, family: &TailFamily, n: usize) -> Result<Vec<f64>> {
        (0..self.xs.len())
            .into_par_iter()
            .map(|i| {
                let approx = gauss::mills(self.xs[i], family, n)?.value;
                Ok(self.density[i] * (self.mills[i] - approx))
            })
            .collect()
    }
}

/// `xmin, xmin + step, ...` up to `xmax` (inclusive up to rounding).
pub fn uniform_grid(xmin: f64, xmax: f64, step: f64) -> Result<Vec<f64>> {
    if !(xmin.is_finite() && xmax.is_finite()) || xmax < xmin {
        return Err(Error::InvalidParameter(format!(
            "empty range [{xmin}, {xmax}]"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "step must be > 0, got {step}"
        )));
    }
    let count = ((xmax - xmin) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| xmin + i as f64 * step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignPattern {
    NonNegative,
    NonPositive,
    Mixed,
}

impl SignPattern {
    pub fn name(self) -> &'static str {
        match self {
            SignPattern::NonNegative => "non-negative",
            SignPattern::NonPositive => "non-positive",
            SignPattern::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxError {
    pub n: usize,
    pub family: FamilyKind,
    /// `max |Delta_n|`
    pub value: f64,
    pub location: f64,
    /// `Delta_n` at the maximiser.
    pub signed: f64,
    /// `|Delta_n|` keeps decreasing at three points beyond the grid.
    pub decays_beyond: bool,
    /// Sign of `Delta_n` on the grid, ignoring values below `1e-12` of the
    /// maximum.
    pub sign: SignPattern,
}

pub fn max_abs_delta(family: &TailFamily, n: usize, grid: &ReferenceGrid) -> Result<MaxError> {
    let deltas = grid.deltas(family, n)?;
    let (best, _) = deltas
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, d)| {
            if d.abs() > bv {
                (i, d.abs())
            } else {
                (bi, bv)
            }
        });
    let xs = grid.xs();
    let lo = xs[best.saturating_sub(1)];
    let hi = xs[(best + 1).min(xs.len() - 1)];
    let abs_delta = |x: f64| gauss::delta(n, family, x).map(f64::abs);

    let (mut location, mut value) = (xs[best], deltas[best].abs());
    if hi > lo {
        let x = golden_section_max(&abs_delta, lo, hi, REFINE_WIDTH)?;
        let v = abs_delta(x)?;
        if v > value {
            location = x;
            value = v;
        }
    }

    let right = *xs.last().unwrap();
    let mut prev = deltas.last().unwrap().abs();
    let mut decays_beyond = prev <= value;
    for factor in [1.25, 1.5, 2.0] {
        let v = abs_delta(right * factor)?;
        decays_beyond &= v <= prev;
        prev = v;
    }

    let floor = 1e-12 * value;
    let pos = deltas.iter().any(|&d| d > floor);
    let neg = deltas.iter().any(|&d| d < -floor);
    let sign = match (pos, neg) {
        (true, true) => SignPattern::Mixed,
        (_, true) => SignPattern::NonPositive,
        _ => SignPattern::NonNegative,
    };

    Ok(MaxError {
        n,
        family: family.kind(),
        value,
        location,
        signed: gauss::delta(n, family, location)?,
        decays_beyond,
        sign,
    })
}

fn golden_section_max<F>(f: &F, mut a: f64, mut b: f64, width: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > width {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok((a + b) / 2.0)
}
