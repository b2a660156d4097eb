//! Generic continued-fraction evaluation.
//!
//! A continued fraction `b0 + a1/(b1 + a2/(b2 + ...))` is described by a
//! [`ContinuedFraction`] implementation. Levels use the standard indexing:
//! level `k >= 1` carries the partial numerator `a_k` and denominator `b_k`,
//! and the depth-`n` convergent `A_n/B_n` stops after level `n`.
//!
//! Backward evaluation is the default path. The forward Wallis-Euler
//! recursion is exposed for the places that need `A_n` and `B_n` themselves.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Binary exponent above which the forward recursion rescales its state.
const RESCALE_EXPONENT: i32 = 500;

/// Largest depth accepted by [`continuant_oracle`].
pub const CONTINUANT_MAX_DEPTH: usize = 8;

/// A half-open interval of abscissae `lower < x < upper` (or `lower <= x`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lower: f64,
    pub lower_closed: bool,
    pub upper: f64,
}

impl Domain {
    /// `(0, inf)`
    pub const POSITIVE: Domain = Domain {
        lower: 0.0,
        lower_closed: false,
        upper: f64::INFINITY,
    };

    /// `[0, inf)`
    pub const NON_NEGATIVE: Domain = Domain {
        lower: 0.0,
        lower_closed: true,
        upper: f64::INFINITY,
    };

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lower_closed {
            x >= self.lower
        } else {
            x > self.lower
        };
        above && x < self.upper
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                x,
                domain: self.to_string(),
            })
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lower_closed { '[' } else { '(' };
        write!(f, "{open}{}, {})", self.lower, self.upper)
    }
}

/// Coefficient generators of a continued fraction at a point `x`.
pub trait ContinuedFraction {
    /// Partial numerator `a_k`, `k >= 1`.
    fn numerator(&self, k: usize, x: f64) -> f64;

    /// Partial denominator `b_k`; `k = 0` is the leading term `b_0`.
    fn denominator(&self, k: usize, x: f64) -> f64;

    /// Interval on which the fraction is claimed to converge.
    fn domain(&self) -> Domain {
        Domain::POSITIVE
    }

    /// Hook for specs whose coefficients can be invalid at some level.
    fn check_level(&self, _k: usize, _x: f64) -> Result<()> {
        Ok(())
    }
}

impl<C: ContinuedFraction + ?Sized> ContinuedFraction for &C {
    fn numerator(&self, k: usize, x: f64) -> f64 {
        (**self).numerator(k, x)
    }
    fn denominator(&self, k: usize, x: f64) -> f64 {
        (**self).denominator(k, x)
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn check_level(&self, k: usize, x: f64) -> Result<()> {
        (**self).check_level(k, x)
    }
}

/// A fraction whose coefficients are also available with their first and
/// second derivatives in `x`.
pub trait DifferentiableFraction: ContinuedFraction {
    fn numerator_jet(&self, k: usize, x: f64) -> Jet;
    fn denominator_jet(&self, k: usize, x: f64) -> Jet;
}

/// Laplace's fraction `1/(x + 1/(x + 2/(x + 3/(x + ...))))` for the Gaussian
/// Mills ratio: `a_1 = 1`, `a_k = k - 1` for `k >= 2`, `b_k = x`, `b_0 = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Laplace;

impl ContinuedFraction for Laplace {
    fn numerator(&self, k: usize, _x: f64) -> f64 {
        if k <= 1 {
            1.0
        } else {
            (k - 1) as f64
        }
    }

    fn denominator(&self, k: usize, x: f64) -> f64 {
        if k == 0 {
            0.0
        } else {
            x
        }
    }
}

impl DifferentiableFraction for Laplace {
    fn numerator_jet(&self, k: usize, x: f64) -> Jet {
        Jet::constant(self.numerator(k, x))
    }

    fn denominator_jet(&self, k: usize, x: f64) -> Jet {
        if k == 0 {
            Jet::constant(0.0)
        } else {
            Jet::variable(x)
        }
    }
}

/// The same Mills ratio written in `v = 1/x^2` with unit denominators:
/// `(1/x) / (1 + v/(1 + 2v/(1 + 3v/(1 + ...))))`.
///
/// The equivalence transform with `p_k = x` maps it onto [`Laplace`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LaplaceInverseSquare;

impl ContinuedFraction for LaplaceInverseSquare {
    fn numerator(&self, k: usize, x: f64) -> f64 {
        if k <= 1 {
            1.0 / x
        } else {
            (k - 1) as f64 / (x * x)
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

/// A fraction built from closures; `b` is also queried at `k = 0`.
pub struct FnFraction<A, B> {
    a: A,
    b: B,
    domain: Domain,
}

impl<A, B> FnFraction<A, B>
where
    A: Fn(usize, f64) -> f64,
    B: Fn(usize, f64) -> f64,
{
    pub fn new(a: A, b: B, domain: Domain) -> Self {
        Self { a, b, domain }
    }
}

impl<A, B> ContinuedFraction for FnFraction<A, B>
where
    A: Fn(usize, f64) -> f64,
    B: Fn(usize, f64) -> f64,
{
    fn numerator(&self, k: usize, x: f64) -> f64 {
        (self.a)(k, x)
    }
    fn denominator(&self, k: usize, x: f64) -> f64 {
        (self.b)(k, x)
    }
    fn domain(&self) -> Domain {
        self.domain
    }
}

/// Result of [`equivalence_transform`]: `a'_k = p_{k-1} p_k a_k`, `b'_k = p_k b_k`.
pub struct Transformed<C, P> {
    inner: C,
    p: P,
}

/// Rescale a fraction by a nonvanishing sequence `p(k, x)` with `p(0, x) = 1`.
/// Every convergent is unchanged.
///
/// The sequence may depend on the evaluation point; invalid values are
/// reported when the offending level is first evaluated.
pub fn equivalence_transform<C, P>(frac: C, p: P) -> Transformed<C, P>
where
    C: ContinuedFraction,
    P: Fn(usize, f64) -> f64,
{
    Transformed { inner: frac, p }
}

impl<C, P> ContinuedFraction for Transformed<C, P>
where
    C: ContinuedFraction,
    P: Fn(usize, f64) -> f64,
{
    fn numerator(&self, k: usize, x: f64) -> f64 {
        (self.p)(k - 1, x) * (self.p)(k, x) * self.inner.numerator(k, x)
    }

    fn denominator(&self, k: usize, x: f64) -> f64 {
        (self.p)(k, x) * self.inner.denominator(k, x)
    }

    fn domain(&self) -> Domain {
        self.inner.domain()
    }

    fn check_level(&self, k: usize, x: f64) -> Result<()> {
        let value = (self.p)(k, x);
        let valid = if k == 0 {
            value == 1.0
        } else {
            value != 0.0 && value.is_finite()
        };
        if !valid {
            return Err(Error::InvalidTransform { k, value });
        }
        self.inner.check_level(k, x)
    }
}

fn coefficients<C: ContinuedFraction>(frac: &C, k: usize, x: f64) -> Result<(f64, f64)> {
    frac.check_level(k, x)?;
    let a = if k == 0 { 0.0 } else { frac.numerator(k, x) };
    let b = frac.denominator(k, x);
    if a.is_finite() && b.is_finite() {
        Ok((a, b))
    } else {
        Err(Error::NonFiniteCoefficient { level: k })
    }
}

/// Numerators and denominators of the depth-`n` convergent and its
/// predecessor, all four multiplied by the same factor `2^(-log2_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergentState {
    pub depth: usize,
    pub a_n: f64,
    pub a_prev: f64,
    pub b_n: f64,
    pub b_prev: f64,
    pub log2_scale: i64,
}

impl ConvergentState {
    pub fn value(&self) -> f64 {
        self.a_n / self.b_n
    }

    pub fn prev_value(&self) -> f64 {
        self.a_prev / self.b_prev
    }

    /// `ln |B_n|` with the rescaling undone.
    pub fn ln_abs_b_n(&self) -> f64 {
        self.b_n.abs().ln() + self.log2_scale as f64 * std::f64::consts::LN_2
    }

    /// `ln |B_{n-1}|` with the rescaling undone.
    pub fn ln_abs_b_prev(&self) -> f64 {
        self.b_prev.abs().ln() + self.log2_scale as f64 * std::f64::consts::LN_2
    }

    /// `A_n B_{n-1} - A_{n-1} B_n` as a scaled mantissa and the binary
    /// exponent (`2 * log2_scale`) needed to restore it.
    pub fn determinant(&self) -> (f64, i64) {
        (
            self.a_n * self.b_prev - self.a_prev * self.b_n,
            2 * self.log2_scale,
        )
    }

    fn rescale(&mut self) {
        let big = self.b_n.abs().max(self.a_n.abs());
        let (factor, shift) = if big > 2f64.powi(RESCALE_EXPONENT) {
            (2f64.powi(-RESCALE_EXPONENT), RESCALE_EXPONENT as i64)
        } else if big != 0.0 && big < 2f64.powi(-RESCALE_EXPONENT) {
            (2f64.powi(RESCALE_EXPONENT), -(RESCALE_EXPONENT as i64))
        } else {
            return;
        };
        self.a_n *= factor;
        self.a_prev *= factor;
        self.b_n *= factor;
        self.b_prev *= factor;
        self.log2_scale += shift;
    }
}

/// Forward Wallis-Euler recursion, one level per call to `next`.
///
/// The first item is the depth-0 state (`A_0 = b_0`, `B_0 = 1`, with the
/// conventional `A_{-1} = 1`, `B_{-1} = 0`).
pub struct Convergents<C> {
    frac: C,
    x: f64,
    state: Option<ConvergentState>,
    failed: bool,
}

impl<C: ContinuedFraction> Convergents<C> {
    pub fn new(frac: C, x: f64) -> Self {
        Self {
            frac,
            x,
            state: None,
            failed: false,
        }
    }
}

impl<C: ContinuedFraction> Iterator for Convergents<C> {
    type Item = Result<ConvergentState>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let k = self.state.map_or(0, |s| s.depth + 1);
        let (a, b) = match coefficients(&self.frac, k, self.x) {
            Ok(ab) => ab,
            Err(e) => {
                self.failed = true;
                return Some(Err(e));
            }
        };
        let next = match self.state {
            None => ConvergentState {
                depth: 0,
                a_n: b,
                a_prev: 1.0,
                b_n: 1.0,
                b_prev: 0.0,
                log2_scale: 0,
            },
            Some(s) => {
                let mut n = ConvergentState {
                    depth: k,
                    a_n: b * s.a_n + a * s.a_prev,
                    a_prev: s.a_n,
                    b_n: b * s.b_n + a * s.b_prev,
                    b_prev: s.b_n,
                    log2_scale: s.log2_scale,
                };
                n.rescale();
                n
            }
        };
        self.state = Some(next);
        Some(Ok(next))
    }
}

/// `A_n`, `B_n` and their predecessors by the forward recursion.
pub fn forward_recurrence<C: ContinuedFraction>(
    frac: &C,
    x: f64,
    n: usize,
) -> Result<ConvergentState> {
    frac.domain().check(x)?;
    forward_unchecked(frac, x, n)
}

pub(crate) fn forward_unchecked<C: ContinuedFraction>(
    frac: &C,
    x: f64,
    n: usize,
) -> Result<ConvergentState> {
    let mut last = None;
    for state in Convergents::new(frac, x).take(n + 1) {
        last = Some(state?);
    }
    Ok(last.expect("depth 0 is always produced"))
}

/// Depth-`n` convergent evaluated from the bottom up, with the last
/// denominator `b_n` replaced by `tail`.
///
/// With `tail = b_n(x)` this is the ordinary convergent `A_n/B_n`.
pub fn eval_backward<C: ContinuedFraction>(frac: &C, x: f64, n: usize, tail: f64) -> Result<f64> {
    frac.domain().check(x)?;
    backward_unchecked(frac, x, n, tail)
}

pub(crate) fn backward_unchecked<C: ContinuedFraction>(
    frac: &C,
    x: f64,
    n: usize,
    tail: f64,
) -> Result<f64> {
    if !tail.is_finite() {
        return Err(Error::NonFiniteCoefficient { level: n });
    }
    frac.check_level(n, x)?;
    let mut t = tail;
    for m in (0..n).rev() {
        if t == 0.0 {
            return Err(Error::ZeroDenominator { level: m + 1 });
        }
        let (a, _) = coefficients(frac, m + 1, x)?;
        let (_, b) = coefficients(frac, m, x)?;
        t = b + a / t;
    }
    Ok(t)
}

/// Backward recurrence carried out on value, first and second derivative.
pub fn eval_backward_jet<C: DifferentiableFraction>(
    frac: &C,
    x: f64,
    n: usize,
    tail: Jet,
) -> Result<Jet> {
    if !tail.is_finite() {
        return Err(Error::NonFiniteCoefficient { level: n });
    }
    let mut t = tail;
    for m in (0..n).rev() {
        if t.value == 0.0 {
            return Err(Error::ZeroDenominator { level: m + 1 });
        }
        let a = frac.numerator_jet(m + 1, x);
        let b = frac.denominator_jet(m, x);
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFiniteCoefficient { level: m + 1 });
        }
        t = b + a / t;
    }
    Ok(t)
}

/// Convergent with both the last numerator (`alpha` in place of `a_n`) and
/// the last denominator (`b_n + gamma`) modified:
///
/// `(A_n + g A_{n-1} + (alpha - a_n) A_{n-2}) / (B_n + g B_{n-1} + (alpha - a_n) B_{n-2})`.
pub fn eval_doubly_modified<C: ContinuedFraction>(
    frac: &C,
    x: f64,
    n: usize,
    alpha: f64,
    gamma: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "doubly modified convergents need depth >= 1".into(),
        ));
    }
    frac.domain().check(x)?;
    let s = forward_unchecked(frac, x, n - 1)?;
    let (_, b_n) = coefficients(frac, n, x)?;
    let last = b_n + gamma;
    if last == 0.0 {
        return Err(Error::ZeroDenominator { level: n });
    }
    let num = last * s.a_n + alpha * s.a_prev;
    let den = last * s.b_n + alpha * s.b_prev;
    if den == 0.0 {
        return Err(Error::ZeroDenominator { level: n });
    }
    Ok(num / den)
}

/// `(A_n, B_n)` by expanding the continuant determinants term by term over
/// all permutations. Exponential cost; for cross-checking only.
pub fn continuant_oracle<C: ContinuedFraction>(frac: &C, x: f64, n: usize) -> Result<(f64, f64)> {
    if n > CONTINUANT_MAX_DEPTH {
        return Err(Error::DepthOutOfRange {
            depth: n,
            max: CONTINUANT_MAX_DEPTH,
        });
    }
    frac.domain().check(x)?;
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let (ak, bk) = coefficients(frac, k, x)?;
        a.push(ak);
        b.push(bk);
    }

    // Row i holds level `first + i`: a on the subdiagonal, b on the
    // diagonal, -1 on the superdiagonal.
    let matrix = |first: usize| {
        let size = n + 1 - first;
        let mut m = vec![vec![0.0; size]; size];
        for (i, row) in m.iter_mut().enumerate() {
            let level = first + i;
            row[i] = b[level];
            if i > 0 {
                row[i - 1] = a[level];
            }
            if i + 1 < size {
                row[i + 1] = -1.0;
            }
        }
        m
    };

    Ok((leibniz_det(&matrix(0)), leibniz_det(&matrix(1))))
}

fn leibniz_det(m: &[Vec<f64>]) -> f64 {
    let size = m.len();
    if size == 0 {
        return 1.0;
    }
    (0..size)
        .permutations(size)
        .map(|perm| {
            let inversions = (0..size)
                .tuple_combinations()
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            sign * perm
                .iter()
                .enumerate()
                .map(|(r, &c)| m[r][c])
                .product::<f64>()
        })
        .sum()
}

/// Stop rule for adaptive forward evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adaptive {
    pub rel_tol: f64,
    pub max_depth: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_depth: 500,
        }
    }
}

/// Run the forward recursion until two successive convergents agree to
/// `rel_tol`. A vanishing numerator terminates the fraction exactly.
pub fn eval_adaptive<C: ContinuedFraction>(frac: &C, x: f64, rule: Adaptive) -> Result<f64> {
    frac.domain().check(x)?;
    let mut prev: Option<f64> = None;
    for state in Convergents::new(frac, x).take(rule.max_depth + 1) {
        let s = state?;
        if s.depth >= 1 && frac.numerator(s.depth, x) == 0.0 {
            return prev.ok_or(Error::ZeroDenominator { level: s.depth });
        }
        if s.b_n == 0.0 {
            prev = None;
            continue;
        }
        let value = s.value();
        if let Some(p) = prev {
            if (value - p).abs() <= rule.rel_tol * value.abs() {
                return Ok(value);
            }
        }
        prev = Some(value);
    }
    Err(Error::NoConvergence {
        depth: rule.max_depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn laplace_first_convergents() {
        assert_eq!(forward_recurrence(&Laplace, 2.0, 1).unwrap().value(), 0.5);
        assert_eq!(forward_recurrence(&Laplace, 1.0, 2).unwrap().value(), 0.5);
        assert_eq!(forward_recurrence(&Laplace, 1.0, 3).unwrap().value(), 0.75);
    }

    #[test]
    fn backward_examples() {
        assert_eq!(eval_backward(&Laplace, 1.0, 2, 1.0).unwrap(), 0.5);
        let v = eval_backward(&Laplace, 1.0, 2, 2.0).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-16);
        let f = forward_recurrence(&Laplace, 1.0, 30).unwrap().value();
        let b = eval_backward(&Laplace, 1.0, 30, 1.0).unwrap();
        assert!(rel(b, f) < 1e-13);
    }

    #[test]
    fn backward_depth_zero_returns_tail() {
        assert_eq!(eval_backward(&Laplace, 1.0, 0, 3.5).unwrap(), 3.5);
    }

    #[test]
    fn zero_tail_is_reported_with_level() {
        let err = eval_backward(&Laplace, 1.0, 3, 0.0).unwrap_err();
        assert_eq!(err, Error::ZeroDenominator { level: 3 });
    }

    #[test]
    fn domain_is_enforced() {
        assert!(matches!(
            forward_recurrence(&Laplace, 0.0, 2),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            eval_backward(&Laplace, -1.0, 2, 1.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn non_finite_coefficient_names_the_level() {
        let frac = FnFraction::new(
            |k, _| if k == 3 { f64::NAN } else { 1.0 },
            |_, x| x,
            Domain::POSITIVE,
        );
        assert_eq!(
            forward_recurrence(&frac, 1.0, 5).unwrap_err(),
            Error::NonFiniteCoefficient { level: 3 }
        );
    }

    #[test]
    fn doubly_modified_reductions() {
        let x = 1.0;
        for n in 1..10 {
            let a_n = Laplace.numerator(n, x);
            let plain = eval_doubly_modified(&Laplace, x, n, a_n, 0.0).unwrap();
            let fwd = forward_recurrence(&Laplace, x, n).unwrap().value();
            assert!(rel(plain, fwd) < 1e-15);
        }
        let a2 = Laplace.numerator(2, 1.0);
        let g = eval_doubly_modified(&Laplace, 1.0, 2, a2, 1.0).unwrap();
        let b = eval_backward(&Laplace, 1.0, 2, 2.0).unwrap();
        assert!(rel(g, b) < 1e-15);
        // alpha = 0 cuts the last level: 1/(x + 0/x) = 1 at x = 1
        let cut = eval_doubly_modified(&Laplace, 1.0, 2, 0.0, 0.0).unwrap();
        assert_eq!(cut, 1.0);
    }

    #[test]
    fn doubly_modified_rejects_vanishing_denominator() {
        assert_eq!(
            eval_doubly_modified(&Laplace, 1.0, 2, 1.0, -1.0).unwrap_err(),
            Error::ZeroDenominator { level: 2 }
        );
    }

    #[test]
    fn continuant_small_cases() {
        assert_eq!(continuant_oracle(&Laplace, 3.0, 1).unwrap(), (1.0, 3.0));
        assert_eq!(continuant_oracle(&Laplace, 1.0, 2).unwrap(), (1.0, 2.0));
        let (a, b) = continuant_oracle(&Laplace, 1.0, 3).unwrap();
        let s = forward_recurrence(&Laplace, 1.0, 3).unwrap();
        assert_eq!((a, b), (s.a_n, s.b_n));
        assert_eq!(
            continuant_oracle(&Laplace, 1.0, 9).unwrap_err(),
            Error::DepthOutOfRange { depth: 9, max: 8 }
        );
    }

    #[test]
    fn continuant_matches_recursion_up_to_eight() {
        for &x in &[0.5, 1.0, 2.7] {
            for n in 0..=CONTINUANT_MAX_DEPTH {
                let (a, b) = continuant_oracle(&Laplace, x, n).unwrap();
                let s = forward_recurrence(&Laplace, x, n).unwrap();
                assert!(rel(a, s.a_n) < 1e-12 || (a == 0.0 && s.a_n == 0.0));
                assert!(rel(b, s.b_n) < 1e-12);
            }
        }
    }

    #[test]
    fn identity_transform_is_identity() {
        let t = equivalence_transform(Laplace, |_, _| 1.0);
        for k in 1..10 {
            assert_eq!(t.numerator(k, 2.0), Laplace.numerator(k, 2.0));
            assert_eq!(t.denominator(k, 2.0), Laplace.denominator(k, 2.0));
        }
    }

    #[test]
    fn inverse_square_form_transforms_onto_laplace() {
        let x = 2.0;
        let t = equivalence_transform(LaplaceInverseSquare, |k, x| if k == 0 { 1.0 } else { x });
        for k in 1..10 {
            assert!((t.numerator(k, x) - Laplace.numerator(k, x)).abs() < 1e-14);
            assert!((t.denominator(k, x) - Laplace.denominator(k, x)).abs() < 1e-14);
        }
        for n in 1..=10 {
            let a = forward_recurrence(&LaplaceInverseSquare, x, n)
                .unwrap()
                .value();
            let b = forward_recurrence(&Laplace, x, n).unwrap().value();
            assert!(rel(a, b) < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn transform_rejects_zero_and_unnormalized_sequences() {
        let zero_at_3 = equivalence_transform(Laplace, |k, _| if k == 3 { 0.0 } else { 1.0 });
        assert_eq!(
            forward_recurrence(&zero_at_3, 1.0, 5).unwrap_err(),
            Error::InvalidTransform { k: 3, value: 0.0 }
        );
        let bad_start = equivalence_transform(Laplace, |_, _| 2.0);
        assert_eq!(
            forward_recurrence(&bad_start, 1.0, 5).unwrap_err(),
            Error::InvalidTransform { k: 0, value: 2.0 }
        );
    }

    #[test]
    fn rescaling_keeps_ratios_and_tracks_magnitude() {
        // B_n(x) grows like sqrt(n!) so depth 2000 crosses 2^500 several times.
        let s = forward_recurrence(&Laplace, 1.0, 2000).unwrap();
        assert!(s.log2_scale > 0);
        let b = eval_backward(&Laplace, 1.0, 2000, 1.0).unwrap();
        assert!(rel(s.value(), b) < 1e-12);
        assert!(s.ln_abs_b_n().is_finite() && s.ln_abs_b_n() > 2000.0);
    }

    #[test]
    fn adaptive_stops_on_exact_termination() {
        let frac = FnFraction::new(
            |k, _| if k >= 3 { 0.0 } else { 1.0 },
            |k, x| if k == 0 { 0.0 } else { x },
            Domain::POSITIVE,
        );
        let v = eval_adaptive(&frac, 2.0, Adaptive::default()).unwrap();
        assert_eq!(v, 1.0 / (2.0 + 0.5));
    }

    #[test]
    fn adaptive_reports_cap() {
        let rule = Adaptive {
            rel_tol: 1e-15,
            max_depth: 5,
        };
        assert_eq!(
            eval_adaptive(&Laplace, 0.5, rule).unwrap_err(),
            Error::NoConvergence { depth: 5 }
        );
    }
}
