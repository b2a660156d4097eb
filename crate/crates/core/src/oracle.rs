//! Reference values built only from the expansions in this crate.
//!
//! The Gaussian Mills ratio comes from the Taylor series at 0 below `x = 1`
//! and from a deep plain Laplace convergent above, with the depth chosen so
//! that the truncation bound `n!/(B_n B_{n+1})` falls under `1e-15` of the
//! value. The Gamma ratio comes from the Laguerre fraction, cross-checked by
//! quadrature of its integral representation.

use crate::cf::{self, Domain, Laplace};
use crate::error::{Error, Result};
use crate::gamma::{self, GammaForm};
use crate::gauss::{classic_with_bounds, phi, taylor_coefficients, SQRT_PI_OVER_2};

/// Relative size of the truncation bound at which the deep fraction stops.
const CF_REL_TOL: f64 = 1e-15;
/// Hard cap on the deep-fraction depth.
const CF_MAX_DEPTH: usize = 100_000;
/// Taylor terms are summed until one drops below this.
const TAYLOR_TERM_TOL: f64 = 1e-18;
const TAYLOR_MAX_TERMS: usize = 200;

/// Quadrature range and panel count for the Gamma cross-check.
const QUAD_UPPER: f64 = 60.0;
const QUAD_PANELS: usize = 120_000;
/// Largest relative disagreement tolerated between the Gamma branches.
const GAMMA_BRANCH_TOL: f64 = 1e-7;

/// Gaussian Mills ratio `R(x)` for `x >= 0`.
pub fn reference_mills(x: f64) -> Result<f64> {
    Domain::NON_NEGATIVE.check(x)?;
    if x == 0.0 {
        Ok(SQRT_PI_OVER_2)
    } else if x < 1.0 {
        Ok(reference_mills_taylor(x))
    } else {
        reference_mills_cf(x)
    }
}

/// Taylor branch; accurate to about `1e-15` relative for `x <= 2`.
pub fn reference_mills_taylor(x: f64) -> f64 {
    let c = taylor_coefficients(TAYLOR_MAX_TERMS);
    let mut sum = 0.0;
    let mut power = 1.0;
    let mut last = c.len();
    for (k, ck) in c.iter().enumerate() {
        let term = ck * power;
        if term.abs() < TAYLOR_TERM_TOL && k as f64 > x * x {
            last = k;
            break;
        }
        power *= x;
    }
    // Horner over the kept terms for a cleaner rounding profile.
    for ck in c[..last].iter().rev() {
        sum = sum * x + ck;
    }
    sum
}

/// Deep plain-convergent branch, valid for any `x > 0`.
pub fn reference_mills_cf(x: f64) -> Result<f64> {
    Domain::POSITIVE.check(x)?;
    let depth = oracle_depth(x)?;
    cf::eval_backward(&Laplace, x, depth + 1, x)
}

/// Smallest depth whose truncation bound is below `1e-15` of the value.
pub fn oracle_depth(x: f64) -> Result<usize> {
    for (n, item) in classic_with_bounds(x).take(CF_MAX_DEPTH).enumerate() {
        let (value, bound) = item?;
        if bound < CF_REL_TOL * value {
            return Ok(n);
        }
    }
    Err(Error::NoConvergence {
        depth: CF_MAX_DEPTH,
    })
}

/// Gaussian upper tail `1 - Phi(x) = phi(x) R(x)`.
pub fn reference_tail(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.5);
    }
    Ok(phi(x) * reference_mills(x)?)
}

/// `M_s(x) = x^(1-s) e^x Gamma(s, x)`.
///
/// The value is the adaptively converged Laguerre fraction. For `x >= 1` it
/// must agree with [`gamma_mills_quadrature`] to `1e-7` relative.
pub fn reference_gamma_mills(s: f64, x: f64) -> Result<f64> {
    let primary = gamma::evaluate(GammaForm::Laguerre, s, x)?;
    if x >= 1.0 {
        let check = gamma_mills_quadrature(s, x)?;
        let relative = (primary - check).abs() / primary.abs();
        if relative.is_nan() || relative > GAMMA_BRANCH_TOL {
            return Err(Error::OracleMismatch {
                primary,
                check,
                relative,
            });
        }
    }
    Ok(primary)
}

/// Composite Simpson rule for `int_0^inf (1 + u/x)^(s-1) e^(-u) du`, cut at
/// `u = 60`. The omitted piece is below `e^-60 (1 + 60/x)^(s-1)` times a
/// modest factor for the shapes used here.
pub fn gamma_mills_quadrature(s: f64, x: f64) -> Result<f64> {
    gamma::GammaParams::new(s, x)?;
    if x <= 0.0 {
        return Err(Error::Domain {
            x,
            domain: Domain::POSITIVE.to_string(),
        });
    }
    let f = |u: f64| (1.0 + u / x).powf(s - 1.0) * (-u).exp();
    let h = QUAD_UPPER / QUAD_PANELS as f64;
    let mut sum = f(0.0) + f(QUAD_UPPER);
    for i in 1..QUAD_PANELS {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    Ok(sum * h / 3.0)
}
