//! Terminating-denominator families `beta_n(x)` for Laplace's fraction.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gauss::{mod_constants, ModConstants};
use crate::jet::Jet;

/// Step for the central-difference fallback on custom tails.
const CUSTOM_FD_STEP: f64 = 1e-5;

/// How the linear coefficient `c_n` of the improved exponential family is
/// chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum SlopeRule {
    /// `c_n = lambda_n + sqrt(r_n) beta_n(0)`; makes `beta_n'(0) = lambda_n`.
    #[default]
    SqrtRate,
    /// `c_n = lambda_n + r_n beta_n(0)`, the coefficient as it is sometimes
    /// printed. Does not satisfy the first-derivative fit.
    Displayed,
}

impl SlopeRule {
    pub fn slope(self, k: &ModConstants) -> f64 {
        match self {
            SlopeRule::SqrtRate => k.lambda + k.r.sqrt() * k.beta0,
            SlopeRule::Displayed => k.lambda + k.r * k.beta0,
        }
    }
}

/// A caller-supplied terminating denominator.
pub trait CustomTail: Send + Sync {
    fn value(&self, n: usize, x: f64) -> f64;
    fn deriv(&self, n: usize, x: f64) -> f64;
    /// `None` selects central differences of [`CustomTail::deriv`].
    fn second_deriv(&self, _n: usize, _x: f64) -> Option<f64> {
        None
    }
}

#[derive(Clone, Default)]
pub enum TailFamily {
    /// `beta_n(x) = x`, the plain convergent.
    #[default]
    Classic,
    /// Fixed point of `beta = x + n/beta`: `x/2 + sqrt(x^2/4 + n)`.
    LimitAnsatz,
    /// `x/2 + sqrt(x^2/4 + beta_n(0)^2)`.
    SqrtDuembgen,
    /// `lambda_n x + beta_n(0)`.
    Linear,
    /// `x + sqrt(n + 1)`.
    LeeLinear,
    /// `x + beta_n(0)`.
    ShiftLinear,
    /// `c_n x + beta_n(0) exp(-sqrt(r_n) x)`.
    ImprovedExponential(SlopeRule),
    Custom(Arc<dyn CustomTail>),
}

impl fmt::Debug for TailFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailFamily::ImprovedExponential(rule) => {
                f.debug_tuple("ImprovedExponential").field(rule).finish()
            }
            other => write!(f, "{:?}", other.kind()),
        }
    }
}

/// Family identifiers as they appear on the command line and in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Classic,
    LimitAnsatz,
    SqrtDuembgen,
    Linear,
    LeeLinear,
    ShiftLinear,
    ImprovedExponential,
    Custom,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 8] = [
        FamilyKind::Classic,
        FamilyKind::LimitAnsatz,
        FamilyKind::SqrtDuembgen,
        FamilyKind::Linear,
        FamilyKind::LeeLinear,
        FamilyKind::ShiftLinear,
        FamilyKind::ImprovedExponential,
        FamilyKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Classic => "classic",
            FamilyKind::LimitAnsatz => "limit-ansatz",
            FamilyKind::SqrtDuembgen => "sqrt",
            FamilyKind::Linear => "linear",
            FamilyKind::LeeLinear => "lee",
            FamilyKind::ShiftLinear => "shift-linear",
            FamilyKind::ImprovedExponential => "improved-expo",
            FamilyKind::Custom => "custom",
        }
    }

    /// Built-in family for this kind; `None` for [`FamilyKind::Custom`].
    pub fn builtin(self) -> Option<TailFamily> {
        Some(match self {
            FamilyKind::Classic => TailFamily::Classic,
            FamilyKind::LimitAnsatz => TailFamily::LimitAnsatz,
            FamilyKind::SqrtDuembgen => TailFamily::SqrtDuembgen,
            FamilyKind::Linear => TailFamily::Linear,
            FamilyKind::LeeLinear => TailFamily::LeeLinear,
            FamilyKind::ShiftLinear => TailFamily::ShiftLinear,
            FamilyKind::ImprovedExponential => {
                TailFamily::ImprovedExponential(SlopeRule::default())
            }
            FamilyKind::Custom => return None,
        })
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family `{s}`")))
    }
}

impl TailFamily {
    pub fn kind(&self) -> FamilyKind {
        match self {
            TailFamily::Classic => FamilyKind::Classic,
            TailFamily::LimitAnsatz => FamilyKind::LimitAnsatz,
            TailFamily::SqrtDuembgen => FamilyKind::SqrtDuembgen,
            TailFamily::Linear => FamilyKind::Linear,
            TailFamily::LeeLinear => FamilyKind::LeeLinear,
            TailFamily::ShiftLinear => FamilyKind::ShiftLinear,
            TailFamily::ImprovedExponential(_) => FamilyKind::ImprovedExponential,
            TailFamily::Custom(_) => FamilyKind::Custom,
        }
    }

    /// `beta_n(x)` together with its first two derivatives.
    pub fn jet(&self, n: usize, x: f64) -> Jet {
        let nf = n as f64;
        match self {
            TailFamily::Classic => Jet::variable(x),
            TailFamily::LimitAnsatz => half_plus_root(x, nf),
            TailFamily::SqrtDuembgen => {
                let b0 = mod_constants(n).beta0;
                half_plus_root(x, b0 * b0)
            }
            TailFamily::Linear => {
                let k = mod_constants(n);
                Jet::new(k.lambda * x + k.beta0, k.lambda, 0.0)
            }
            TailFamily::LeeLinear => Jet::new(x + (nf + 1.0).sqrt(), 1.0, 0.0),
            TailFamily::ShiftLinear => Jet::new(x + mod_constants(n).beta0, 1.0, 0.0),
            TailFamily::ImprovedExponential(rule) => {
                let k = mod_constants(n);
                let c = rule.slope(&k);
                let rate = k.r.sqrt();
                let e = k.beta0 * (-rate * x).exp();
                Jet::new(c * x + e, c - rate * e, k.r * e)
            }
            TailFamily::Custom(tail) => {
                let d2 = tail.second_deriv(n, x).unwrap_or_else(|| {
                    let h = CUSTOM_FD_STEP;
                    (tail.deriv(n, x + h) - tail.deriv(n, x - h)) / (2.0 * h)
                });
                Jet::new(tail.value(n, x), tail.deriv(n, x), d2)
            }
        }
    }

    pub fn value(&self, n: usize, x: f64) -> f64 {
        match self {
            TailFamily::Custom(tail) => tail.value(n, x),
            _ => self.jet(n, x).value,
        }
    }

    pub fn deriv(&self, n: usize, x: f64) -> f64 {
        match self {
            TailFamily::Custom(tail) => tail.deriv(n, x),
            _ => self.jet(n, x).d1,
        }
    }

    pub fn second_deriv(&self, n: usize, x: f64) -> f64 {
        self.jet(n, x).d2
    }
}

/// `x/2 + sqrt(x^2/4 + g)` and its derivatives.
fn half_plus_root(x: f64, g: f64) -> Jet {
    let root = (0.25 * x * x + g).sqrt();
    Jet::new(
        0.5 * x + root,
        0.5 + 0.25 * x / root,
        g / (4.0 * root * root * root),
    )
}

pub fn tail_value(family: &TailFamily, n: usize, x: f64) -> f64 {
    family.value(n, x)
}

pub fn tail_deriv(family: &TailFamily, n: usize, x: f64) -> f64 {
    family.deriv(n, x)
}

/// A terminating denominator given as samples `(x, beta(x))`, interpolated
/// by a monotone piecewise cubic (Fritsch-Carlson slopes). The same table is
/// used at every depth. Outside the sampled range the end cubic's tangent
/// line is followed.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedTail {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl TabulatedTail {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter(
                "a tabulated tail needs at least two points".into(),
            ));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidParameter("non-finite table entry".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParameter(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        let slopes = fritsch_carlson(&xs, &ys);
        Ok(Self { xs, ys, slopes })
    }

    /// Parse two comma-separated columns `x,beta`. Blank lines, `#` comments
    /// and a non-numeric header line are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (Some(x), Some(y), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::InvalidParameter(format!(
                    "line {}: expected two columns",
                    lineno + 1
                )));
            };
            match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(x), Ok(y)) => points.push((x, y)),
                _ if points.is_empty() && lineno == 0 => continue,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "line {}: not a number",
                        lineno + 1
                    )))
                }
            }
        }
        Self::new(points)
    }

    fn locate(&self, x: f64) -> usize {
        let last = self.xs.len() - 2;
        match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            i => (i - 1).min(last),
        }
    }

    pub fn eval(&self, x: f64) -> Jet {
        let first = self.xs[0];
        let last = *self.xs.last().unwrap();
        if x < first {
            let d = self.slopes[0];
            return Jet::new(self.ys[0] + d * (x - first), d, 0.0);
        }
        if x > last {
            let d = *self.slopes.last().unwrap();
            return Jet::new(self.ys.last().unwrap() + d * (x - last), d, 0.0);
        }
        let i = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        // cubic Hermite basis in t
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let dt = (6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1;
        let dtt = (12.0 * t - 6.0) * y0
            + (6.0 * t - 4.0) * m0
            + (-12.0 * t + 6.0) * y1
            + (6.0 * t - 2.0) * m1;
        Jet::new(value, dt / h, dtt / (h * h))
    }
}

fn fritsch_carlson(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let secants: Vec<f64> = (0..n - 1)
        .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
        .collect();
    let mut m = vec![0.0; n];
    m[0] = secants[0];
    m[n - 1] = secants[n - 2];
    for i in 1..n - 1 {
        m[i] = if secants[i - 1] * secants[i] <= 0.0 {
            0.0
        } else {
            (secants[i - 1] + secants[i]) / 2.0
        };
    }
    for i in 0..n - 1 {
        let d = secants[i];
        if d == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / d;
        let b = m[i + 1] / d;
        let s = a * a + b * b;
        if s > 9.0 {
            let tau = 3.0 / s.sqrt();
            m[i] = tau * a * d;
            m[i + 1] = tau * b * d;
        }
    }
    m
}

impl CustomTail for TabulatedTail {
    fn value(&self, _n: usize, x: f64) -> f64 {
        self.eval(x).value
    }
    fn deriv(&self, _n: usize, x: f64) -> f64 {
        self.eval(x).d1
    }
    fn second_deriv(&self, _n: usize, x: f64) -> Option<f64> {
        Some(self.eval(x).d2)
    }
}
