//! Gaussian Mills ratio `R(x) = (1 - Phi(x)) / phi(x)` through Laplace's
//! continued fraction and its modified terminating denominators.
//!
//! Depths in this module follow the convention where `R_n` denotes the
//! approximant whose last partial numerator is `n`:
//!
//! ```text
//! R_0 = 1/beta_0,  R_1 = 1/(x + 1/beta_1),  R_2 = 1/(x + 1/(x + 2/beta_2)), ...
//! ```
//!
//! so `R_n` sits at engine depth `n + 1` (see [`engine_depth`]).

use std::f64::consts::PI;

use crate::cf::{self, Convergents, Laplace};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::oracle::reference_mills;
use crate::tails::{FamilyKind, TailFamily};

/// `sqrt(pi/2) = R(0)`
pub const SQRT_PI_OVER_2: f64 = 1.253_314_137_315_500_3;
/// `sqrt(2/pi) = 1/R(0)`
pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;
/// `1/sqrt(2 pi) = phi(0)`
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Engine depth of the approximant `R_n`.
pub const fn engine_depth(n: usize) -> usize {
    n + 1
}

/// Standard Gaussian density.
pub fn phi(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// First-order equation `R' = q R - 1` satisfied by the Mills ratio of a
/// density with `f' = -q f`.
#[derive(Debug, Clone, Copy)]
pub struct HazardOde {
    pub q: fn(f64) -> f64,
    pub q_prime: fn(f64) -> f64,
    /// Value of `R` at the anchor point `0`.
    pub init: f64,
}

impl HazardOde {
    pub const GAUSSIAN: HazardOde = HazardOde {
        q: |x| x,
        q_prime: |_| 1.0,
        init: SQRT_PI_OVER_2,
    };

    /// `R' - (q R - 1)`
    pub fn residual(&self, x: f64, r: f64, r_prime: f64) -> f64 {
        r_prime - ((self.q)(x) * r - 1.0)
    }
}

/// Per-depth constants of the fitted families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModConstants {
    pub n: usize,
    /// `beta_n(0)`, the value forcing `R_n(0) = sqrt(pi/2)`.
    pub beta0: f64,
    /// `beta_n(0)^2 - n`, the slope forcing a first-order fit at 0.
    pub lambda: f64,
    /// `2 (beta_n(0)^2 - n - 1/2)`, the curvature ratio `beta''(0)/beta(0)`
    /// forcing a second-order fit at 0.
    pub r: f64,
    /// Linear coefficient of the improved exponential family under the
    /// default [`SlopeRule`](crate::tails::SlopeRule).
    pub c: f64,
}

/// `sqrt(2) Gamma(n/2 + 1) / Gamma(n/2 + 1/2)`
pub fn beta0(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    std::f64::consts::SQRT_2 * (libm::lgamma(h + 1.0) - libm::lgamma(h + 0.5)).exp()
}

/// `beta_k(0) = k / beta_{k-1}(0)` from `beta_0(0) = sqrt(2/pi)`.
pub fn beta0_by_recursion(n: usize) -> f64 {
    (1..=n).fold(SQRT_2_OVER_PI, |b, k| k as f64 / b)
}

pub fn mod_constants(n: usize) -> ModConstants {
    let beta0 = beta0(n);
    let sq = beta0 * beta0;
    let lambda = sq - n as f64;
    let r = 2.0 * (sq - n as f64 - 0.5);
    ModConstants {
        n,
        beta0,
        lambda,
        r,
        c: lambda + r.sqrt() * beta0,
    }
}

/// Which side of `R(x)` an approximant is known to lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    Upper,
    Lower,
    Unknown,
}

impl BoundSide {
    pub fn name(self) -> &'static str {
        match self {
            BoundSide::Upper => "upper",
            BoundSide::Lower => "lower",
            BoundSide::Unknown => "unknown",
        }
    }

    /// Proven sides: `R_n` is above `R` for even `n` and below for odd `n`,
    /// for the plain convergents and the square-root and linear families.
    pub fn for_family(kind: FamilyKind, n: usize) -> BoundSide {
        match kind {
            FamilyKind::Classic | FamilyKind::SqrtDuembgen | FamilyKind::Linear => {
                if n.is_multiple_of(2) {
                    BoundSide::Upper
                } else {
                    BoundSide::Lower
                }
            }
            _ => BoundSide::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Approximation {
    pub value: f64,
    pub n: usize,
    pub family: FamilyKind,
    pub bound_side: BoundSide,
    /// `n!/(B_n B_{n+1})`, only for plain convergents.
    pub trunc_bound: Option<f64>,
}

fn check_point(family: &TailFamily, x: f64) -> Result<()> {
    let domain = if family.kind() == FamilyKind::Classic {
        cf::Domain::POSITIVE
    } else {
        cf::Domain::NON_NEGATIVE
    };
    domain.check(x)
}

/// `R_n(x)` with terminating denominator `beta_n(x)` taken from `family`.
pub fn mills(x: f64, family: &TailFamily, n: usize) -> Result<Approximation> {
    check_point(family, x)?;
    let tail = family.value(n, x);
    let value = cf::backward_unchecked(&Laplace, x, engine_depth(n), tail)?;
    let kind = family.kind();
    let trunc_bound = match kind {
        FamilyKind::Classic => Some(truncation_bound(x, n)?),
        _ => None,
    };
    Ok(Approximation {
        value,
        n,
        family: kind,
        bound_side: BoundSide::for_family(kind, n),
        trunc_bound,
    })
}

/// `R_n`, `R_n'` and `R_n''` at `u` by differentiating the backward recurrence.
pub fn mills_jet(n: usize, family: &TailFamily, u: f64) -> Result<Jet> {
    check_point(family, u)?;
    cf::eval_backward_jet(&Laplace, u, engine_depth(n), family.jet(n, u))
}

/// Hazard rate `phi(x) / (1 - Phi(x))`, for any finite `x`.
pub fn hazard(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain {
            x,
            domain: "(-inf, inf)".into(),
        });
    }
    let r = if x >= 0.0 {
        reference_mills(x)?
    } else {
        // Phi(x) = 1 - Phi(-x)
        1.0 / phi(x) - reference_mills(-x)?
    };
    Ok(1.0 / r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticSum {
    pub value: f64,
    /// Set when the first omitted term is larger than the last kept one.
    pub diverging: bool,
}

/// Partial sum `(1/x) sum_{j=0..m} (-1)^j (2j-1)!! / x^(2j)` of the
/// divergent expansion at infinity.
pub fn asymptotic_series(x: f64, m: usize) -> Result<AsymptoticSum> {
    cf::Domain::POSITIVE.check(x)?;
    let inv2 = 1.0 / (x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..=m {
        term *= -((2 * j - 1) as f64) * inv2;
        sum += term;
    }
    Ok(AsymptoticSum {
        value: sum / x,
        diverging: (2 * m + 1) as f64 * inv2 > 1.0,
    })
}

/// Coefficients of the expansion of `R` at 0, obtained by matching powers
/// in `R' = x R - 1`: `c_0 = sqrt(pi/2)`, `c_1 = -1`, `c_{k+1} = c_{k-1}/(k+1)`.
pub fn taylor_coefficients(m: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let v = match k {
            0 => SQRT_PI_OVER_2,
            1 => -1.0,
            _ => c[k - 2] / k as f64,
        };
        c.push(v);
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorSum {
    pub value: f64,
    /// Bound on the omitted terms; infinite when the tail is not yet
    /// geometrically decreasing.
    pub error_bound: f64,
}

/// Taylor polynomial of degree `m` for `R` at 0.
///
/// The even and odd tails are each dominated by a geometric series of ratio
/// `x^2/(m+3)`, which gives the returned error bound.
pub fn taylor_mills(x: f64, m: usize) -> TaylorSum {
    let c = taylor_coefficients(m + 2);
    let value = c[..=m].iter().rev().fold(0.0, |acc, &ck| acc * x + ck);
    let ratio = x * x / (m + 3) as f64;
    let error_bound = if ratio < 1.0 {
        let ax = x.abs();
        (c[m + 1].abs() * ax.powi(m as i32 + 1) + c[m + 2].abs() * ax.powi(m as i32 + 2))
            / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    TaylorSum { value, error_bound }
}

/// Approximation error `Delta_n(x) = (1 - Phi(x)) - phi(x) R_n(x)`.
pub fn delta(n: usize, family: &TailFamily, x: f64) -> Result<f64> {
    let approx = mills(x, family, n)?.value;
    Ok(phi(x) * (reference_mills(x)? - approx))
}

/// `delta_n(u) = 1 + R_n'(u) - u R_n(u) = -Delta_n'(u) / phi(u)`.
pub fn error_integrand(n: usize, family: &TailFamily, u: f64) -> Result<f64> {
    let r = mills_jet(n, family, u)?;
    let q = (HazardOde::GAUSSIAN.q)(u);
    Ok(1.0 + r.d1 - q * r.value)
}

/// `R_n'' - 2 q R_n' + (q^2 - q') R_n - q = -Delta_n''(u) / phi(u)`.
pub fn second_error_integrand(n: usize, family: &TailFamily, u: f64) -> Result<f64> {
    let r = mills_jet(n, family, u)?;
    let ode = HazardOde::GAUSSIAN;
    let q = (ode.q)(u);
    Ok(r.d2 - 2.0 * q * r.d1 + (q * q - (ode.q_prime)(u)) * r.value - q)
}

/// `u beta(u) + beta'(u) + n - beta(u)^2`; its sign times `(-1)^(n-1)` is the
/// sign of `delta_n(u)`.
pub fn sign_operator(n: usize, family: &TailFamily, u: f64) -> f64 {
    let beta = family.value(n, u);
    u * beta + family.deriv(n, u) + n as f64 - beta * beta
}

/// Two-point rational approximant `[1/2]` fitted at 0 and infinity.
pub fn pade_r2(x: f64) -> f64 {
    let s = (2.0 * PI).sqrt();
    ((PI - 2.0) * s + x * (4.0 - PI)) / (2.0 * (PI - 2.0) + x * s + x * x * (4.0 - PI))
}

/// Terminating denominator that turns `R_1 = 1/(x + 1/beta_1)` into
/// [`pade_r2`].
pub fn pade_beta1(x: f64) -> f64 {
    let s = (2.0 * PI).sqrt();
    ((PI - 2.0) * s + x * (4.0 - PI)) / (2.0 * (PI - 2.0) + x * (3.0 - PI) * s)
}

/// `n! / (B_n B_{n+1})` for Laplace's fraction, a strict bound on
/// `|R(x) - R_n(x)|` for the plain convergents.
pub fn truncation_bound(x: f64, n: usize) -> Result<f64> {
    cf::Domain::POSITIVE.check(x)?;
    let s = cf::forward_unchecked(&Laplace, x, n + 1)?;
    let ln = libm::lgamma(n as f64 + 1.0) - s.ln_abs_b_prev() - s.ln_abs_b_n();
    Ok(ln.exp())
}

/// Successive plain convergents paired with their truncation bounds, one
/// per depth `n = 0, 1, 2, ...`.
pub(crate) fn classic_with_bounds(x: f64) -> impl Iterator<Item = Result<(f64, f64)>> {
    let mut ln_fact = 0.0;
    Convergents::new(Laplace, x)
        .skip(1)
        .enumerate()
        .map(move |(n, state)| {
            let s = state?;
            if n > 0 {
                ln_fact += (n as f64).ln();
            }
            let bound = (ln_fact - s.ln_abs_b_prev() - s.ln_abs_b_n()).exp();
            Ok((s.value(), bound))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tails::SlopeRule;

    #[test]
    fn density_values() {
        assert_eq!(phi(0.0), 0.3989422804014327);
        assert_eq!(phi(1.3), phi(-1.3));
        assert!((phi(1.0) - 0.24197072451914337).abs() < 1e-17);
    }

    #[test]
    fn engine_and_approximant_depths() {
        let x = 1.7;
        let r0 = mills(x, &TailFamily::Classic, 0).unwrap().value;
        let r1 = mills(x, &TailFamily::Classic, 1).unwrap().value;
        assert_eq!(r0, 1.0 / x);
        assert!((r1 - 1.0 / (x + 1.0 / x)).abs() < 1e-16);
    }

    #[test]
    fn classic_first_depth_at_one() {
        let a = mills(1.0, &TailFamily::Classic, 1).unwrap();
        assert_eq!(a.value, 0.5);
        assert_eq!(a.bound_side, BoundSide::Lower);
        assert_eq!(a.trunc_bound, Some(0.5));
        assert!(reference_mills(1.0).unwrap() > a.value);
        let b = mills(1.0, &TailFamily::Classic, 0).unwrap();
        assert_eq!(b.bound_side, BoundSide::Upper);
        assert!(reference_mills(1.0).unwrap() < b.value);
    }

    #[test]
    fn leading_asymptotics() {
        let v = mills(50.0, &TailFamily::Classic, 2).unwrap().value * 50.0;
        assert!((0.999..=1.0).contains(&v));
    }

    #[test]
    fn fitted_families_hit_r0_at_origin() {
        for fam in [
            TailFamily::ShiftLinear,
            TailFamily::Linear,
            TailFamily::SqrtDuembgen,
            TailFamily::ImprovedExponential(SlopeRule::SqrtRate),
        ] {
            for n in 0..8 {
                let v = mills(0.0, &fam, n).unwrap().value;
                assert!((v - SQRT_PI_OVER_2).abs() < 2e-15, "{fam:?} {n}");
            }
        }
    }

    #[test]
    fn classic_needs_positive_x() {
        assert!(matches!(
            mills(0.0, &TailFamily::Classic, 1),
            Err(Error::Domain { .. })
        ));
        assert!(mills(-1.0, &TailFamily::Linear, 1).is_err());
        assert!(mills(f64::NAN, &TailFamily::Linear, 1).is_err());
    }

    #[test]
    fn improved_expo_reports_unknown_side() {
        let fam = TailFamily::ImprovedExponential(SlopeRule::SqrtRate);
        let a = mills(1.0, &fam, 2).unwrap();
        assert_eq!(a.bound_side, BoundSide::Unknown);
        assert_eq!(a.trunc_bound, None);
    }

    #[test]
    fn hazard_values() {
        assert!((hazard(0.0).unwrap() - 0.7978845608028654).abs() < 2e-16);
        assert!((hazard(1.0).unwrap() - 1.525_135_276_160_981).abs() < 1e-14);
        let h = hazard(10.0).unwrap();
        assert!(h > 10.0 && h < 10.1);
        // Phi(-x) = 1 - Phi(x): at x = -1 the hazard is phi(1)/Phi(1)
        let expected = 0.24197072451914337 / (1.0 - 0.15865525393145707);
        assert!((hazard(-1.0).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn asymptotic_partial_sums() {
        let a = asymptotic_series(3.0, 0).unwrap();
        assert_eq!(a.value, 1.0 / 3.0);
        let b = asymptotic_series(5.0, 2).unwrap();
        assert!((b.value - 0.19296).abs() < 1e-15);
        assert!(!b.diverging);
        assert!(asymptotic_series(1.0, 10).unwrap().diverging);
    }

    #[test]
    fn taylor_recurrence() {
        let c = taylor_coefficients(5);
        assert_eq!(c[0], SQRT_PI_OVER_2);
        assert_eq!(c[1], -1.0);
        assert_eq!(c[2], SQRT_PI_OVER_2 / 2.0);
        assert_eq!(c[3], -1.0 / 3.0);
        assert_eq!(taylor_mills(0.0, 10).value, SQRT_PI_OVER_2);
    }

    #[test]
    fn taylor_at_one_against_deep_fraction() {
        let t = taylor_mills(1.0, 40);
        let deep = crate::oracle::reference_mills_cf(1.0).unwrap();
        assert!((t.value - deep).abs() <= 1e-13);
        assert!(t.error_bound < 1e-20);
        assert!(taylor_mills(5.0, 10).error_bound.is_infinite());
    }

    #[test]
    fn constants_examples() {
        assert!((beta0(0) - 0.7978845608028654).abs() < 1e-15);
        assert!((beta0(1) - 1.2533141373155003).abs() < 1e-15);
        assert!((beta0(2) - 1.5957691216057308).abs() < 1e-15);
        let k1 = mod_constants(1);
        assert!((k1.lambda - 0.5707963267948966).abs() < 1e-15);
        assert!((k1.r - 0.14159265358979312).abs() < 1e-15);
        let k0 = mod_constants(0);
        assert!((k0.lambda - std::f64::consts::FRAC_2_PI).abs() < 1e-15);
        assert!((k0.r - 0.27323954473516276).abs() < 1e-15);
    }

    #[test]
    fn delta_examples() {
        let d = delta(1, &TailFamily::Classic, 1.0).unwrap();
        assert!((d - 0.037_669_891_671_885_38).abs() < 1e-15);
        for fam in [TailFamily::ShiftLinear, TailFamily::SqrtDuembgen] {
            assert!(delta(3, &fam, 0.0).unwrap().abs() <= 1e-15);
        }
    }

    #[test]
    fn error_integrand_examples() {
        let v = error_integrand(0, &TailFamily::Classic, 1.0).unwrap();
        assert!((v + 1.0).abs() < 1e-15);
        let v = second_error_integrand(0, &TailFamily::Classic, 1.0).unwrap();
        assert!((v - 3.0).abs() < 1e-14);
        for n in 0..6 {
            assert!(error_integrand(n, &TailFamily::Linear, 0.0).unwrap().abs() < 1e-12);
        }
        let expo = TailFamily::ImprovedExponential(SlopeRule::SqrtRate);
        for n in 0..6 {
            assert!(second_error_integrand(n, &expo, 0.0).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn error_integrand_vanishes_with_exact_tail() {
        // Replace beta_3 by the depth-80 continuation of the fraction below it.
        struct Continuation;
        impl crate::tails::CustomTail for Continuation {
            fn value(&self, n: usize, x: f64) -> f64 {
                exact_remainder(n, x).value
            }
            fn deriv(&self, n: usize, x: f64) -> f64 {
                exact_remainder(n, x).d1
            }
            fn second_deriv(&self, n: usize, x: f64) -> Option<f64> {
                Some(exact_remainder(n, x).d2)
            }
        }
        fn exact_remainder(n: usize, x: f64) -> Jet {
            // levels n+1.. of Laplace's fraction: x + (n+1)/(x + (n+2)/(...))
            let mut t = Jet::variable(x);
            for k in (n + 1..n + 80).rev() {
                t = Jet::variable(x) + Jet::constant(k as f64) / t;
            }
            t
        }
        let fam = TailFamily::Custom(std::sync::Arc::new(Continuation));
        assert!(error_integrand(3, &fam, 2.0).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn error_integrand_equals_minus_delta_slope() {
        let h = 1e-5;
        for fam in [
            TailFamily::Classic,
            TailFamily::SqrtDuembgen,
            TailFamily::Linear,
        ] {
            for n in 0..4 {
                for &u in &[0.7, 1.5, 3.0] {
                    let d = (delta(n, &fam, u + h).unwrap() - delta(n, &fam, u - h).unwrap())
                        / (2.0 * h);
                    let expected = -d / phi(u);
                    let got = error_integrand(n, &fam, u).unwrap();
                    assert!((got - expected).abs() < 1e-6 * expected.abs().max(1e-3));
                }
            }
        }
    }

    #[test]
    fn jet_derivatives_match_central_differences() {
        let h = 1e-5;
        let fam = TailFamily::ImprovedExponential(SlopeRule::SqrtRate);
        for n in 0..5 {
            for &u in &[0.2, 1.0, 4.0] {
                let j = mills_jet(n, &fam, u).unwrap();
                let f = |x| mills(x, &fam, n).unwrap().value;
                let d1 = (f(u + h) - f(u - h)) / (2.0 * h);
                let d2 = (mills_jet(n, &fam, u + h).unwrap().d1
                    - mills_jet(n, &fam, u - h).unwrap().d1)
                    / (2.0 * h);
                assert!((j.d1 - d1).abs() <= 1e-6 * d1.abs().max(1e-3));
                assert!((j.d2 - d2).abs() <= 1e-6 * d2.abs().max(1e-3));
            }
        }
    }

    #[test]
    fn sign_operator_examples() {
        for n in 0..5 {
            for &u in &[0.0, 0.5, 3.0] {
                let g = sign_operator(n, &TailFamily::Classic, u);
                assert!((g - (n + 1) as f64).abs() < 1e-12);
            }
        }
        assert!((sign_operator(3, &TailFamily::LimitAnsatz, 0.0) - 0.5).abs() < 1e-15);
        for u in [0.3, 2.0, 9.0] {
            let g = sign_operator(2, &TailFamily::LimitAnsatz, u);
            assert!((g - TailFamily::LimitAnsatz.deriv(2, u)).abs() < 1e-12);
        }
        for n in 0..20 {
            assert!(sign_operator(n, &TailFamily::SqrtDuembgen, 0.0) < 0.0);
        }
    }

    #[test]
    fn pade_values() {
        assert!((pade_r2(0.0) - SQRT_PI_OVER_2).abs() < 1e-15);
        assert!((1e6 * pade_r2(1e6) - 1.0).abs() < 1e-6);
        for &x in &[0.0, 0.5, 2.0, 7.0] {
            let via_tail = 1.0 / (x + 1.0 / pade_beta1(x));
            assert!((via_tail - pade_r2(x)).abs() < 1e-15);
        }
        // Slope at 0 matches R'(0) = -1.
        let h = 1e-6;
        assert!(((pade_r2(h) - pade_r2(0.0)) / h + 1.0).abs() < 1e-5);
    }

    #[test]
    fn pade_second_order_behaviour_at_infinity() {
        // x^2 (P(x) - 1/x) tends to sqrt(2 pi)(pi - 3)/(4 - pi), so the
        // approximant reproduces only the leading 1/x term of R.
        let limit = (2.0 * PI).sqrt() * (PI - 3.0) / (4.0 - PI);
        let x = 1e5;
        assert!((x * x * (pade_r2(x) - 1.0 / x) - limit).abs() < 1e-3);
    }

    #[test]
    fn truncation_bound_examples() {
        assert!((truncation_bound(1.0, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((truncation_bound(3.0, 0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for i in 0..=90 {
            let b = truncation_bound(1.0 + 0.1 * i as f64, 4).unwrap();
            assert!(b < prev);
            prev = b;
        }
        let r = reference_mills(2.0).unwrap();
        let r6 = mills(2.0, &TailFamily::Classic, 6).unwrap().value;
        assert!((r - r6).abs() < truncation_bound(2.0, 6).unwrap());
    }

    #[test]
    fn bounds_from_iterator_match_direct_calls() {
        for (n, item) in classic_with_bounds(1.3).take(12).enumerate() {
            let (v, b) = item.unwrap();
            let direct = mills(1.3, &TailFamily::Classic, n).unwrap();
            assert!((v - direct.value).abs() < 1e-15);
            assert!((b - direct.trunc_bound.unwrap()).abs() < 1e-13 * b);
        }
    }
}
