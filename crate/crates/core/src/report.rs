//! Text and CSV renderings shared by the command-line tool and the tests.
//!
//! Numbers are printed as the shortest decimal that reads back to the same
//! `f64`, so repeated runs produce identical bytes.

use std::fmt::{self, Write as _};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gauss::{self, phi, BoundSide};
use crate::maxerr::{self, MaxError, ReferenceGrid, IMPROVED_EXPO_TARGETS};
use crate::oracle::reference_mills;
use crate::tails::{FamilyKind, SlopeRule, TailFamily};

pub const TABLE_HEADER: &str = "x,approx,reference,error";
pub const FIGURE_XMAX: f64 = 6.0;
pub const FIGURE_STEP: f64 = 0.01;

/// Shortest round-trip decimal; scientific notation outside `[1e-5, 1e16)`.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// One evaluated point.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub x: f64,
    pub family: FamilyKind,
    pub n: usize,
    pub value: f64,
    pub bound_side: BoundSide,
    pub trunc_bound: Option<f64>,
    pub reference: f64,
    /// `value - reference`
    pub error: f64,
}

pub fn eval_record(x: f64, family: &TailFamily, n: usize) -> Result<EvalRecord> {
    let approx = gauss::mills(x, family, n)?;
    let reference = reference_mills(x)?;
    Ok(EvalRecord {
        x,
        family: approx.family,
        n,
        value: approx.value,
        bound_side: approx.bound_side,
        trunc_bound: approx.trunc_bound,
        reference,
        error: approx.value - reference,
    })
}

impl fmt::Display for EvalRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "x           {}", fmt_num(self.x))?;
        writeln!(f, "family      {}", self.family)?;
        writeln!(f, "n           {}", self.n)?;
        writeln!(f, "value       {}", fmt_num(self.value))?;
        writeln!(f, "bound_side  {}", self.bound_side.name())?;
        if let Some(b) = self.trunc_bound {
            writeln!(f, "trunc_bound {}", fmt_num(b))?;
        }
        writeln!(f, "reference   {}", fmt_num(self.reference))?;
        writeln!(f, "error       {}", fmt_num(self.error))
    }
}

/// `x,approx,reference,error` rows over `xs`, in the order given.
pub fn table_csv(family: &TailFamily, n: usize, xs: &[f64]) -> Result<String> {
    let rows = xs
        .par_iter()
        .map(|&x| {
            let approx = gauss::mills(x, family, n)?.value;
            let reference = reference_mills(x)?;
            Ok(format!(
                "{},{},{},{}\n",
                fmt_num(x),
                fmt_num(approx),
                fmt_num(reference),
                fmt_num(approx - reference)
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = String::with_capacity(rows.iter().map(String::len).sum::<usize>() + 32);
    out.push_str(TABLE_HEADER);
    out.push('\n');
    out.extend(rows);
    Ok(out)
}

/// Depth plotted by each figure id.
pub fn figure_depth(id: u32) -> Result<usize> {
    match id {
        1 => Ok(0),
        2 => Ok(1),
        3 => Ok(4),
        _ => Err(Error::InvalidParameter(format!(
            "unknown figure id {id}, expected 1, 2 or 3"
        ))),
    }
}

/// Families drawn in every figure, in column order.
pub fn figure_families() -> [TailFamily; 3] {
    [
        TailFamily::ImprovedExponential(SlopeRule::default()),
        TailFamily::Linear,
        TailFamily::SqrtDuembgen,
    ]
}

/// `Delta_n` curves on `[0, 6]` for the built-in families plus any named
/// custom tails.
pub fn figure_csv(id: u32, custom: &[(String, TailFamily)]) -> Result<String> {
    let n = figure_depth(id)?;
    let xs = maxerr::uniform_grid(0.0, FIGURE_XMAX, FIGURE_STEP)?;
    let mut columns: Vec<(String, TailFamily)> = figure_families()
        .into_iter()
        .map(|f| (f.kind().name().to_string(), f))
        .collect();
    columns.extend(custom.iter().cloned());

    let rows = xs
        .par_iter()
        .map(|&x| {
            let reference = reference_mills(x)?;
            let density = phi(x);
            let mut line = fmt_num(x);
            for (_, family) in &columns {
                let approx = gauss::mills(x, family, n)?.value;
                line.push(',');
                line.push_str(&fmt_num(density * (reference - approx)));
            }
            line.push('\n');
            Ok(line)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = String::from("x");
    for (name, _) in &columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    out.extend(rows);
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct MaxErrReport {
    pub family: FamilyKind,
    pub xmin: f64,
    pub xmax: f64,
    pub rows: Vec<MaxError>,
}

pub fn maxerr_report(
    family: &TailFamily,
    depths: std::ops::RangeInclusive<usize>,
    grid: &ReferenceGrid,
) -> Result<MaxErrReport> {
    let rows = depths
        .map(|n| maxerr::max_abs_delta(family, n, grid))
        .collect::<Result<Vec<_>>>()?;
    let xs = grid.xs();
    Ok(MaxErrReport {
        family: family.kind(),
        xmin: xs[0],
        xmax: *xs.last().unwrap(),
        rows,
    })
}

impl MaxErrReport {
    /// Relative deviation from the target sequence when its first entry
    /// is aligned with depth `offset`. `None` where no target applies.
    pub fn target_deviation(&self, row: &MaxError, offset: usize) -> Option<(f64, f64)> {
        let idx = row.n.checked_sub(offset)?;
        let target = *IMPROVED_EXPO_TARGETS.get(idx)?;
        Some((target, (row.value - target) / target))
    }

    fn compares_targets(&self) -> bool {
        self.family == FamilyKind::ImprovedExponential
    }
}

impl fmt::Display for MaxErrReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "family {}, x in [{}, {}]",
            self.family,
            fmt_num(self.xmin),
            fmt_num(self.xmax)
        )?;
        let mut header = format!(
            "{:<2} {:<24} {:<20} {:<13} {:<6}",
            "n", "max_abs_delta", "argmax", "sign", "decays"
        );
        if self.compares_targets() {
            for label in ["target@n", "target@n-1"] {
                let _ = write!(header, "  {:<10} {:<9}", label, "rel_dev");
            }
        }
        writeln!(f, "{}", header.trim_end())?;
        for row in &self.rows {
            let mut line = String::new();
            let _ = write!(
                line,
                "{:<2} {:<24} {:<20} {:<13} {:<6}",
                row.n,
                fmt_num(row.value),
                fmt_num(row.location),
                row.sign.name(),
                if row.decays_beyond { "yes" } else { "no" }
            );
            if self.compares_targets() {
                for offset in [0, 1] {
                    match self.target_deviation(row, offset) {
                        Some((t, d)) => {
                            let _ = write!(line, "  {:<10} {:<+9.4}", fmt_num(t), d);
                        }
                        None => {
                            let _ = write!(line, "  {:<10} {:<9}", "-", "-");
                        }
                    }
                }
            }
            writeln!(f, "{}", line.trim_end())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.2533141373155003), "1.2533141373155003");
        assert_eq!(fmt_num(2.866515718791939e-7), "2.866515718791939e-7");
        assert_eq!(fmt_num(-3e-9), "-3e-9");
        assert_eq!(fmt_num(1e16), "1e16");
        for v in [0.1, 1.0 / 3.0, 12345.678, 6.02e23, -1e-300] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn eval_record_classic_one() {
        let r = eval_record(1.0, &TailFamily::Classic, 1).unwrap();
        assert_eq!(r.value, 0.5);
        assert_eq!(r.bound_side, BoundSide::Lower);
        assert!(r.trunc_bound.is_some());
        let text = r.to_string();
        assert!(text.contains("value       0.5\n"));
        assert!(text.contains("trunc_bound"));
    }

    #[test]
    fn eval_record_shift_linear_origin() {
        let r = eval_record(0.0, &TailFamily::ShiftLinear, 3).unwrap();
        assert_eq!(r.value, 1.2533141373155003);
        assert!(r.error.abs() < 1e-15);
        assert!(!r.to_string().contains("trunc_bound"));
    }

    #[test]
    fn table_layout() {
        let xs = maxerr::uniform_grid(0.0, 1.0, 0.5).unwrap();
        let fam = TailFamily::ImprovedExponential(SlopeRule::default());
        let csv = table_csv(&fam, 1, &xs).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TABLE_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(!csv.contains('\r'));
        let err0: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
        assert!(err0.abs() < 1e-14);
        assert!(table_csv(&TailFamily::Classic, 1, &[0.0]).is_err());
    }

    #[test]
    fn figure_ids() {
        assert!(figure_csv(4, &[]).is_err());
        let csv = figure_csv(2, &[]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x,improved-expo,linear,sqrt");
        let first: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(first[0], 0.0);
        for v in &first[1..] {
            assert!(v.abs() < 1e-14);
        }
        assert_eq!(csv.lines().count(), 602);
    }
}
