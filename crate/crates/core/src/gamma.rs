//! Mills ratio of the Gamma density,
//! `M_s(x) = x^(1-s) e^x Gamma(s, x) = int_0^inf (1 + u/x)^(s-1) e^(-u) du`,
//! which satisfies `M' = (1 + (1-s)/x) M - 1` with `M(inf) = 1`.
//!
//! Three fractions for `M_s` are provided ([`GammaForm`]) plus one for the
//! lower part `x^(1-s) e^x gamma(s, x)`.

use crate::cf::{self, Adaptive, ContinuedFraction, Domain};
use crate::error::{Error, Result};

/// Distance from an integer below which the Laguerre numerators are treated
/// as vanishing.
const INTEGER_SNAP: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    pub s: f64,
    pub x: f64,
}

impl GammaParams {
    pub fn new(s: f64, x: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "shape must be > 0, got {s}"
            )));
        }
        Domain::NON_NEGATIVE.check(x)?;
        Ok(Self { s, x })
    }

    /// Drift coefficient `q(x) = 1 + (1-s)/x` of the density.
    pub fn q(&self) -> f64 {
        1.0 + (1.0 - self.s) / self.x
    }
}

/// `x/(x + (1-s)/(1 + 1/(x + (2-s)/(1 + 2/(x + ...)))))`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Fraction {
    pub s: f64,
}

impl ContinuedFraction for L1Fraction {
    fn numerator(&self, k: usize, x: f64) -> f64 {
        match k {
            0 | 1 => x,
            k if k % 2 == 0 => (k / 2) as f64 - self.s,
            k => (k / 2) as f64,
        }
    }

    fn denominator(&self, k: usize, x: f64) -> f64 {
        match k {
            0 => 0.0,
            k if k % 2 == 0 => 1.0,
            _ => x,
        }
    }
}

/// Laguerre's contracted form, scaled to return `M_s`:
/// `x/(x+1-s + (s-1)/(x+3-s + 2(s-2)/(x+5-s + ...)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreFraction {
    pub s: f64,
}

impl ContinuedFraction for LaguerreFraction {
    fn numerator(&self, k: usize, x: f64) -> f64 {
        if k <= 1 {
            return x;
        }
        let j = (k - 1) as f64;
        let nearest = self.s.round();
        if nearest == j && (self.s - nearest).abs() < INTEGER_SNAP {
            0.0
        } else {
            j * (self.s - j)
        }
    }

    fn denominator(&self, k: usize, x: f64) -> f64 {
        if k == 0 {
            0.0
        } else {
            x + (2 * k - 1) as f64 - self.s
        }
    }
}

/// `1/(1 + (1-s)v/(1 + v/(1 + (2-s)v/(1 + 2v/(1 + ...)))))`, `v = 1/x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WinitzkiFraction {
    pub s: f64,
}

impl ContinuedFraction for WinitzkiFraction {
    fn numerator(&self, k: usize, x: f64) -> f64 {
        match k {
            0 | 1 => 1.0,
            k if k % 2 == 0 => ((k / 2) as f64 - self.s) / x,
            k => (k / 2) as f64 / x,
        }
    }

    fn denominator(&self, k: usize, _x: f64) -> f64 {
        if k == 0 {
            0.0
        } else {
            1.0
        }
    }
}

/// Lower part `x^(1-s) e^x int_0^x u^(s-1) e^(-u) du` as
/// `x/(s - s x/(1+s+x - (1+s) x/(2+s+x - ...)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerFraction {
    pub s: f64,
}

impl ContinuedFraction for LowerFraction {
    fn numerator(&self, k: usize, x: f64) -> f64 {
        if k <= 1 {
            x
        } else {
            -((k - 2) as f64 + self.s) * x
        }
    }

    fn denominator(&self, k: usize, x: f64) -> f64 {
        match k {
            0 => 0.0,
            1 => self.s,
            k => (k - 1) as f64 + self.s + x,
        }
    }

    fn domain(&self) -> Domain {
        Domain::NON_NEGATIVE
    }
}

/// The fractions converging to `M_s(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GammaForm {
    L1,
    Laguerre,
    Winitzki,
}

impl GammaForm {
    pub const ALL: [GammaForm; 3] = [GammaForm::L1, GammaForm::Laguerre, GammaForm::Winitzki];

    pub fn name(self) -> &'static str {
        match self {
            GammaForm::L1 => "l1",
            GammaForm::Laguerre => "laguerre",
            GammaForm::Winitzki => "winitzki",
        }
    }
}

fn fixed<C: ContinuedFraction>(frac: &C, x: f64, n: usize) -> Result<f64> {
    cf::eval_backward(frac, x, n, frac.denominator(n, x))
}

pub fn cf_l1(s: f64, x: f64, n: usize) -> Result<f64> {
    GammaParams::new(s, x)?;
    fixed(&L1Fraction { s }, x, n)
}

pub fn laguerre(s: f64, x: f64, n: usize) -> Result<f64> {
    GammaParams::new(s, x)?;
    fixed(&LaguerreFraction { s }, x, n)
}

pub fn winitzki_cf(s: f64, x: f64, n: usize) -> Result<f64> {
    GammaParams::new(s, x)?;
    fixed(&WinitzkiFraction { s }, x, n)
}

pub fn lower_cf(s: f64, x: f64, n: usize) -> Result<f64> {
    GammaParams::new(s, x)?;
    fixed(&LowerFraction { s }, x, n)
}

/// `M_s(x)` from `form`, run until successive convergents agree to `1e-12`
/// relative (at most 500 levels).
pub fn evaluate(form: GammaForm, s: f64, x: f64) -> Result<f64> {
    GammaParams::new(s, x)?;
    let rule = Adaptive::default();
    match form {
        GammaForm::L1 => cf::eval_adaptive(&L1Fraction { s }, x, rule),
        GammaForm::Laguerre => cf::eval_adaptive(&LaguerreFraction { s }, x, rule),
        GammaForm::Winitzki => cf::eval_adaptive(&WinitzkiFraction { s }, x, rule),
    }
}

/// Adaptive evaluation of the lower part.
pub fn evaluate_lower(s: f64, x: f64) -> Result<f64> {
    GammaParams::new(s, x)?;
    cf::eval_adaptive(&LowerFraction { s }, x, Adaptive::default())
}

/// Reduce `s > 1` into `(0, 1]` through `M_s = 1 + ((s-1)/x) M_{s-1}` and
/// finish with `evaluator(s_reduced, x)`.
pub fn reduce_s<F>(s: f64, x: f64, evaluator: F) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    GammaParams::new(s, x)?;
    Domain::POSITIVE.check(x)?;
    let steps = (s.ceil() - 1.0).max(0.0) as usize;
    let base = s - steps as f64;
    let mut m = evaluator(base, x)?;
    for j in 1..=steps {
        let shape = base + j as f64;
        m = 1.0 + (shape - 1.0) / x * m;
    }
    Ok(m)
}

/// Consecutive `L1` convergents at depths `n` and `n + 1`, ordered as
/// `(lower, upper)`. For `s` in `(0, 1]` all coefficients are positive and
/// the pair brackets `M_s(x)`.
pub fn bounds_s01(s: f64, x: f64, n: usize) -> Result<(f64, f64)> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "bracketing needs s in (0, 1], got {s}"
        )));
    }
    let state = cf::forward_recurrence(&L1Fraction { s }, x, n + 1)?;
    let (a, b) = (state.prev_value(), state.value());
    Ok((a.min(b), a.max(b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_examples() {
        for n in 1..12 {
            assert_eq!(cf_l1(1.0, 2.5, n).unwrap(), 1.0);
        }
        assert!((cf_l1(2.0, 3.0, 40).unwrap() - 4.0 / 3.0).abs() < 1e-10);
        let a = cf_l1(0.5, 2.0, 60).unwrap();
        let b = laguerre(0.5, 2.0, 60).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn laguerre_examples() {
        assert!((laguerre(1.0, 5.0, 10).unwrap() - 1.0).abs() < 1e-12);
        let r = reduce_s(3.0, 4.0, |s, x| evaluate(GammaForm::Laguerre, s, x)).unwrap();
        assert!((laguerre(3.0, 4.0, 50).unwrap() - r).abs() < 1e-9);
    }

    #[test]
    fn laguerre_snaps_near_integers() {
        let f = LaguerreFraction { s: 3.0 + 1e-15 };
        assert_eq!(f.numerator(4, 1.0), 0.0);
        assert!(f.numerator(3, 1.0) != 0.0);
        assert!(LaguerreFraction { s: 3.01 }.numerator(4, 1.0) != 0.0);
    }

    #[test]
    fn lower_examples() {
        assert_eq!(lower_cf(0.7, 0.0, 10).unwrap(), 0.0);
        assert_eq!(evaluate_lower(0.7, 0.0).unwrap(), 0.0);
        let v = lower_cf(1.0, 1.0, 30).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn lower_and_upper_parts_sum_to_complete_gamma() {
        let (s, x) = (0.5, 1.0);
        let lower = evaluate_lower(s, x).unwrap();
        let upper = evaluate(GammaForm::Laguerre, s, x).unwrap();
        let total = x.powf(1.0 - s) * x.exp() * libm::tgamma(s);
        assert!((lower + upper - total).abs() < 1e-8);
    }

    #[test]
    fn winitzki_examples() {
        for n in 1..10 {
            assert_eq!(winitzki_cf(1.0, 3.0, n).unwrap(), 1.0);
        }
        let a = winitzki_cf(0.5, 4.0, 60).unwrap();
        let b = laguerre(0.5, 4.0, 60).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn reduction_closed_forms() {
        let ev = |s, x| evaluate(GammaForm::L1, s, x);
        assert!((reduce_s(2.0, 4.0, ev).unwrap() - 1.25).abs() < 1e-12);
        assert!((reduce_s(3.0, 2.0, ev).unwrap() - 2.5).abs() < 1e-12);
        let direct = laguerre(4.5, 3.0, 80).unwrap();
        assert!((reduce_s(4.5, 3.0, ev).unwrap() - direct).abs() < 1e-8);
        // s already in (0, 1] calls the evaluator once, unchanged
        let v = reduce_s(0.4, 2.0, |s, _| Ok(s)).unwrap();
        assert_eq!(v, 0.4);
    }

    #[test]
    fn bracketing_pairs() {
        assert_eq!(bounds_s01(1.0, 2.0, 4).unwrap(), (1.0, 1.0));
        let m = evaluate(GammaForm::Laguerre, 0.5, 2.0).unwrap();
        let (lo, hi) = bounds_s01(0.5, 2.0, 6).unwrap();
        assert!(lo <= m && m <= hi);
        let mut width = f64::INFINITY;
        for n in 2..=12 {
            let (lo, hi) = bounds_s01(0.5, 2.0, n).unwrap();
            assert!(hi - lo < width);
            width = hi - lo;
        }
        assert!(bounds_s01(1.5, 2.0, 3).is_err());
    }

    #[test]
    fn parameter_checks() {
        assert!(cf_l1(0.0, 1.0, 3).is_err());
        assert!(laguerre(-1.0, 1.0, 3).is_err());
        assert!(winitzki_cf(0.5, -1.0, 3).is_err());
        assert!(evaluate(GammaForm::Laguerre, 0.5, f64::NAN).is_err());
    }
}
