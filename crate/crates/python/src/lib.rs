use std::sync::Arc;

use millscf_core::gamma::{self, GammaForm};
use millscf_core::gauss;
use millscf_core::maxerr::{self, ReferenceGrid};
use millscf_core::oracle;
use millscf_core::report;
use millscf_core::tails::TabulatedTail;
use millscf_core::verify::{self, VerifyOptions};
use millscf_core::{FamilyKind, SlopeRule, TailFamily};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: millscf_core::Error) -> PyErr {
    match e {
        millscf_core::Error::NoConvergence { .. }
        | millscf_core::Error::OracleMismatch { .. }
        | millscf_core::Error::ZeroDenominator { .. }
        | millscf_core::Error::NonFiniteCoefficient { .. } => {
            PyArithmeticError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn family(name: &str, slope_rule: &str, tail: Option<Vec<(f64, f64)>>) -> PyResult<TailFamily> {
    let kind: FamilyKind = name.parse().map_err(to_py)?;
    let rule = match slope_rule {
        "sqrt-rate" => SlopeRule::SqrtRate,
        "displayed" => SlopeRule::Displayed,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown slope rule `{other}`, expected sqrt-rate or displayed"
            )))
        }
    };
    Ok(match kind {
        FamilyKind::ImprovedExponential => TailFamily::ImprovedExponential(rule),
        FamilyKind::Custom => {
            let points =
                tail.ok_or_else(|| PyValueError::new_err("family `custom` needs tail points"))?;
            TailFamily::Custom(Arc::new(TabulatedTail::new(points).map_err(to_py)?))
        }
        other => other.builtin().expect("built-in family"),
    })
}

#[pyclass(name = "Approximation", frozen, get_all)]
struct PyApproximation {
    value: f64,
    n: usize,
    family: String,
    bound_side: String,
    trunc_bound: Option<f64>,
}

#[pymethods]
impl PyApproximation {
    fn __repr__(&self) -> String {
        format!(
            "Approximation(value={}, n={}, family='{}', bound_side='{}')",
            self.value, self.n, self.family, self.bound_side
        )
    }
}

#[pyclass(name = "ModConstants", frozen, get_all)]
struct PyModConstants {
    n: usize,
    beta0: f64,
    lambda_: f64,
    r: f64,
    c: f64,
}

#[pyclass(name = "MaxError", frozen, get_all)]
struct PyMaxError {
    n: usize,
    value: f64,
    location: f64,
    signed: f64,
    decays_beyond: bool,
    sign: String,
}

#[pymethods]
impl PyMaxError {
    fn __repr__(&self) -> String {
        format!(
            "MaxError(n={}, value={}, location={})",
            self.n, self.value, self.location
        )
    }
}

#[pyfunction]
fn phi(x: f64) -> f64 {
    gauss::phi(x)
}

/// Modified convergent `R_n(x)` of the Gaussian Mills ratio.
#[pyfunction]
#[pyo3(signature = (x, family = "classic", n = 0, slope_rule = "sqrt-rate", tail = None))]
fn mills(
    x: f64,
    family: &str,
    n: usize,
    slope_rule: &str,
    tail: Option<Vec<(f64, f64)>>,
) -> PyResult<PyApproximation> {
    let fam = self::family(family, slope_rule, tail)?;
    let a = gauss::mills(x, &fam, n).map_err(to_py)?;
    Ok(PyApproximation {
        value: a.value,
        n: a.n,
        family: a.family.name().to_string(),
        bound_side: a.bound_side.name().to_string(),
        trunc_bound: a.trunc_bound,
    })
}

#[pyfunction]
fn reference_mills(x: f64) -> PyResult<f64> {
    oracle::reference_mills(x).map_err(to_py)
}

#[pyfunction]
fn reference_tail(x: f64) -> PyResult<f64> {
    oracle::reference_tail(x).map_err(to_py)
}

#[pyfunction]
fn hazard(x: f64) -> PyResult<f64> {
    gauss::hazard(x).map_err(to_py)
}

#[pyfunction]
fn beta0(n: usize) -> f64 {
    gauss::beta0(n)
}

#[pyfunction]
fn mod_constants(n: usize) -> PyModConstants {
    let k = gauss::mod_constants(n);
    PyModConstants {
        n: k.n,
        beta0: k.beta0,
        lambda_: k.lambda,
        r: k.r,
        c: k.c,
    }
}

/// Tail error `Delta_n(x) = (1 - Phi(x)) - phi(x) R_n(x)`.
#[pyfunction]
#[pyo3(signature = (x, family = "classic", n = 0, slope_rule = "sqrt-rate"))]
fn delta(x: f64, family: &str, n: usize, slope_rule: &str) -> PyResult<f64> {
    let fam = self::family(family, slope_rule, None)?;
    gauss::delta(n, &fam, x).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (u, family = "classic", n = 0, slope_rule = "sqrt-rate"))]
fn error_integrand(u: f64, family: &str, n: usize, slope_rule: &str) -> PyResult<f64> {
    let fam = self::family(family, slope_rule, None)?;
    gauss::error_integrand(n, &fam, u).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (u, family = "classic", n = 0, slope_rule = "sqrt-rate"))]
fn sign_operator(u: f64, family: &str, n: usize, slope_rule: &str) -> PyResult<f64> {
    let fam = self::family(family, slope_rule, None)?;
    Ok(gauss::sign_operator(n, &fam, u))
}

#[pyfunction]
fn pade_r2(x: f64) -> f64 {
    gauss::pade_r2(x)
}

#[pyfunction]
fn truncation_bound(x: f64, n: usize) -> PyResult<f64> {
    gauss::truncation_bound(x, n).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (family, n, xmin = 0.0, xmax = 20.0, step = 1e-3, slope_rule = "sqrt-rate"))]
fn max_error(
    py: Python<'_>,
    family: &str,
    n: usize,
    xmin: f64,
    xmax: f64,
    step: f64,
    slope_rule: &str,
) -> PyResult<PyMaxError> {
    let fam = self::family(family, slope_rule, None)?;
    let e = py
        .detach(|| {
            let grid = ReferenceGrid::new(xmin, xmax, step)?;
            maxerr::max_abs_delta(&fam, n, &grid)
        })
        .map_err(to_py)?;
    Ok(PyMaxError {
        n: e.n,
        value: e.value,
        location: e.location,
        signed: e.signed,
        decays_beyond: e.decays_beyond,
        sign: e.sign.name().to_string(),
    })
}

fn gamma_form(name: &str) -> PyResult<GammaForm> {
    GammaForm::ALL
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown form `{name}`")))
}

/// `M_s(x) = x^(1-s) e^x Gamma(s, x)`.
#[pyfunction]
#[pyo3(signature = (s, x, form = "laguerre"))]
fn gamma_mills(s: f64, x: f64, form: &str) -> PyResult<f64> {
    gamma::evaluate(gamma_form(form)?, s, x).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (s, x, form = "laguerre"))]
fn gamma_mills_reduced(s: f64, x: f64, form: &str) -> PyResult<f64> {
    let form = gamma_form(form)?;
    gamma::reduce_s(s, x, |s, x| gamma::evaluate(form, s, x)).map_err(to_py)
}

#[pyfunction]
fn gamma_bounds(s: f64, x: f64, n: usize) -> PyResult<(f64, f64)> {
    gamma::bounds_s01(s, x, n).map_err(to_py)
}

#[pyfunction]
fn reference_gamma_mills(s: f64, x: f64) -> PyResult<f64> {
    oracle::reference_gamma_mills(s, x).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (family, n, xmin, xmax, step, slope_rule = "sqrt-rate"))]
fn table_csv(
    family: &str,
    n: usize,
    xmin: f64,
    xmax: f64,
    step: f64,
    slope_rule: &str,
) -> PyResult<String> {
    let fam = self::family(family, slope_rule, None)?;
    let xs = maxerr::uniform_grid(xmin, xmax, step).map_err(to_py)?;
    report::table_csv(&fam, n, &xs).map_err(to_py)
}

#[pyfunction]
fn figure_csv(id: u32) -> PyResult<String> {
    report::figure_csv(id, &[]).map_err(to_py)
}

/// Run the invariant suites; returns `(name, passed, checks)` per suite.
#[pyfunction]
#[pyo3(signature = (suite = None))]
fn run_verify(py: Python<'_>, suite: Option<String>) -> PyResult<Vec<(String, bool, usize)>> {
    let opts = VerifyOptions::default();
    let results = py.detach(|| match &suite {
        Some(name) => verify::run_suite(name, &opts).map(|r| vec![r]),
        None => Some(verify::run_all(&opts)),
    });
    let results =
        results.ok_or_else(|| PyValueError::new_err(format!("unknown suite {suite:?}")))?;
    Ok(results
        .into_iter()
        .map(|r| (r.name.to_string(), r.passed(), r.checks))
        .collect())
}

#[pymodule]
fn millscf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyApproximation>()?;
    m.add_class::<PyModConstants>()?;
    m.add_class::<PyMaxError>()?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(mills, m)?)?;
    m.add_function(wrap_pyfunction!(reference_mills, m)?)?;
    m.add_function(wrap_pyfunction!(reference_tail, m)?)?;
    m.add_function(wrap_pyfunction!(hazard, m)?)?;
    m.add_function(wrap_pyfunction!(beta0, m)?)?;
    m.add_function(wrap_pyfunction!(mod_constants, m)?)?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(error_integrand, m)?)?;
    m.add_function(wrap_pyfunction!(sign_operator, m)?)?;
    m.add_function(wrap_pyfunction!(pade_r2, m)?)?;
    m.add_function(wrap_pyfunction!(truncation_bound, m)?)?;
    m.add_function(wrap_pyfunction!(max_error, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_mills, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_mills_reduced, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(reference_gamma_mills, m)?)?;
    m.add_function(wrap_pyfunction!(table_csv, m)?)?;
    m.add_function(wrap_pyfunction!(figure_csv, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
