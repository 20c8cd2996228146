//! Python bindings: frequencies, basis evaluation, Hankel certificates,
//! exponential moments and measure recovery. Structured results come back
//! as plain dicts and lists.

use expmoment::expcore::{self, SeriesCoeffs};
use expmoment::hankel::{self, CheckOptions, HankelForm, Region};
use expmoment::measures::{self, Domain, Measure, MomentSequence};
use expmoment::numerics::{self, parse_rational};
use expmoment::recover;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde::Serialize;

create_exception!(expmoment, MomentError, PyValueError, "Recovery failure; args are (message, stage).");

fn to_py_err(e: expmoment::Error) -> PyErr {
    match e.stage_tag() {
        Some(stage) => MomentError::new_err((e.to_string(), stage.to_string())),
        None => PyValueError::new_err(e.to_string()),
    }
}

/// Round-trips through JSON so every result type maps onto dicts/lists.
fn to_python<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn measure_from(py: Python<'_>, obj: &Bound<'_, PyAny>) -> PyResult<Measure> {
    let text: String = if obj.is_instance_of::<PyString>() {
        obj.extract()?
    } else {
        py.import("json")?.call_method1("dumps", (obj,))?.extract()?
    };
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(format!("invalid measure: {e}")))
}

fn domain_from(text: &str) -> PyResult<Domain> {
    Domain::parse(text).map_err(to_py_err)
}

/// Distinct frequencies `λ_0, ..., λ_N` with `N` odd. Built from a list of
/// numbers or a comma-separated string such as `"1/2,1,2,3"`; integer
/// lists and rational strings keep their exact values.
#[pyclass(name = "Frequencies", module = "expmoment", frozen)]
struct PyFrequencies {
    inner: expmoment::Frequencies,
}

#[pymethods]
impl PyFrequencies {
    #[new]
    fn new(values: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = if values.is_instance_of::<PyString>() {
            let text: String = values.extract()?;
            expmoment::Frequencies::parse_list(&text)
        } else if let Ok(ints) = values.extract::<Vec<i64>>() {
            expmoment::Frequencies::from_rationals(ints.into_iter().map(numerics::rat).collect())
        } else {
            expmoment::Frequencies::new(values.extract::<Vec<f64>>()?)
        }
        .map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn is_exact(&self) -> bool {
        self.inner.exact().is_some()
    }

    /// `Φ^(deriv)(x)`.
    #[pyo3(signature = (x, deriv = 0))]
    fn phi(&self, x: f64, deriv: usize) -> PyResult<f64> {
        expcore::eval_phi_deriv(&self.inner, deriv, x).map_err(to_py_err)
    }

    /// `[b_0(x), ..., b_N(x)]`.
    fn basis(&self, x: f64) -> PyResult<Vec<f64>> {
        Ok(expcore::eval_basis(&self.inner, x).map_err(to_py_err)?.values)
    }

    /// Rational basis values as strings; needs exact frequencies.
    fn basis_exact(&self, x: &str) -> PyResult<Vec<String>> {
        let x = parse_rational(x).map_err(to_py_err)?;
        let b = expcore::eval_basis_exact(&self.inner, &x).map_err(to_py_err)?;
        Ok(b.values.iter().map(ToString::to_string).collect())
    }

    /// Taylor coefficients `a_N..=a_{s_max}`: strings when exact, floats otherwise.
    #[pyo3(signature = (s_max = None))]
    fn taylor<'py>(&self, py: Python<'py>, s_max: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let s_max = s_max.unwrap_or(self.inner.order() + expcore::DEFAULT_SERIES_TERMS);
        let series = expcore::taylor_coeffs(&self.inner, s_max).map_err(to_py_err)?;
        match series.coeffs {
            SeriesCoeffs::Exact(v) => {
                v.iter().map(ToString::to_string).collect::<Vec<_>>().into_pyobject(py).map(Bound::into_any)
            }
            SeriesCoeffs::Float(v) => v.into_pyobject(py).map(Bound::into_any),
        }
    }

    fn __repr__(&self) -> String {
        format!("Frequencies({:?})", self.inner.values())
    }
}

/// Closed-form Chammam determinant as a rational string.
#[pyfunction]
fn chammam_det(alpha: &str, beta: &str, m: usize) -> PyResult<String> {
    let a = parse_rational(alpha).map_err(to_py_err)?;
    let b = parse_rational(beta).map_err(to_py_err)?;
    Ok(hankel::chammam_det(&a, &b, m).map_err(to_py_err)?.to_string())
}

/// Exact determinant of the Hankel form built from rational strings.
#[pyfunction]
#[pyo3(signature = (values, k, form = "Q1"))]
fn hankel_det(values: Vec<String>, k: usize, form: &str) -> PyResult<String> {
    let seq = values.iter().map(|v| parse_rational(v)).collect::<Result<Vec<_>, _>>().map_err(to_py_err)?;
    let form = HankelForm::parse(form).map_err(to_py_err)?;
    let m = hankel::build_hankel_exact(&seq, k, form).map_err(to_py_err)?;
    Ok(numerics::exact_det(&m).to_string())
}

/// Certificate that the basis values at `x` form a moment sequence.
#[pyfunction]
#[pyo3(signature = (freq, x, region = "halfline", exact = false, epsilon = hankel::DEFAULT_EPSILON))]
fn theorem1_check<'py>(
    py: Python<'py>,
    freq: &PyFrequencies,
    x: f64,
    region: &str,
    exact: bool,
    epsilon: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let region = Region::parse(region).map_err(to_py_err)?;
    let opts = CheckOptions { exact, epsilon, ..Default::default() };
    let report = hankel::theorem1_check(&freq.inner, x, region, &opts).map_err(to_py_err)?;
    to_python(py, &report)
}

/// `[ĉ_0, ..., ĉ_N]` for a measure given as a dict or JSON string.
#[pyfunction]
fn exp_moments(py: Python<'_>, freq: &PyFrequencies, measure: &Bound<'_, PyAny>) -> PyResult<Vec<f64>> {
    let mu = measure_from(py, measure)?;
    Ok(measures::exp_moments(&freq.inner, &mu).map_err(to_py_err)?.values().to_vec())
}

/// Whether `moments` (even length) is a truncated moment sequence on `domain`.
#[pyfunction]
#[pyo3(signature = (moments, domain = "halfline"))]
fn is_solvable(moments: Vec<f64>, domain: &str) -> PyResult<bool> {
    let seq = MomentSequence::new(moments, domain_from(domain)?).map_err(to_py_err)?;
    let report = match seq.domain {
        Domain::Halfline => recover::stieltjes_solvable(&seq),
        Domain::Interval { .. } => recover::hausdorff_solvable(&seq),
    }
    .map_err(to_py_err)?;
    Ok(report.solvable)
}

/// Atoms `[(x, w), ...]` reproducing `moments` on `domain`.
#[pyfunction]
#[pyo3(signature = (moments, domain = "halfline"))]
fn recover_measure(moments: Vec<f64>, domain: &str) -> PyResult<Vec<(f64, f64)>> {
    let seq = MomentSequence::new(moments, domain_from(domain)?).map_err(to_py_err)?;
    let nu = recover::recover_measure(&seq).map_err(to_py_err)?;
    Ok(nu.atoms().iter().map(|a| (a.x, a.w)).collect())
}

/// Full exponential-to-classical transfer report.
#[pyfunction]
#[pyo3(signature = (freq, measure, domain = "halfline"))]
fn verify_transfer<'py>(
    py: Python<'py>,
    freq: &PyFrequencies,
    measure: &Bound<'_, PyAny>,
    domain: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let mu = measure_from(py, measure)?;
    let report = recover::verify_transfer(&freq.inner, &mu, domain_from(domain)?).map_err(to_py_err)?;
    to_python(py, &report)
}

#[pymodule]
#[pyo3(name = "expmoment")]
fn expmoment_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFrequencies>()?;
    m.add_function(wrap_pyfunction!(chammam_det, m)?)?;
    m.add_function(wrap_pyfunction!(hankel_det, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_check, m)?)?;
    m.add_function(wrap_pyfunction!(exp_moments, m)?)?;
    m.add_function(wrap_pyfunction!(is_solvable, m)?)?;
    m.add_function(wrap_pyfunction!(recover_measure, m)?)?;
    m.add_function(wrap_pyfunction!(verify_transfer, m)?)?;
    m.add("MomentError", m.py().get_type::<MomentError>())?;
    Ok(())
}
