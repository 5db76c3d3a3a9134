//! Python module `confinv`: counting, invariant reports and verification suites.
//! Structured results come back as plain dicts and lists.

use std::path::PathBuf;

use clap::ValueEnum;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use confinv::cli::Suite;
use confinv::invariants::{invariance_check, invariant_report, jacobian_rank, standard_family, MIN_TRIALS};
use confinv::metric_io::{build_metric_jet, parse_metric};
use confinv::orbit;

create_exception!(confinv, ConfinvError, PyException, "Domain error raised by the confinv core.");

fn to_py(e: confinv::Error) -> PyErr {
    ConfinvError::new_err((e.reason(), e.module(), e.to_string()))
}

/// Counting errors on too small a dimension belong to the counting module.
fn counting_err(e: confinv::Error) -> PyErr {
    match e {
        confinv::Error::DimensionTooSmall(_) => ConfinvError::new_err((e.reason(), "orbit_counting", e.to_string())),
        e => to_py(e),
    }
}

fn to_object<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Number of independent invariants of pure order `k` in dimension `n`.
#[pyfunction]
fn hilbert(n: usize, k: usize) -> PyResult<i128> {
    orbit::hilbert(n, k).map_err(counting_err)
}

/// Number of independent invariants of order at most `k`.
#[pyfunction]
fn trdeg(n: usize, k: usize) -> PyResult<i128> {
    orbit::trdeg(n, k).map_err(counting_err)
}

/// Counting data at `(n, k)`.
#[pyfunction]
fn count(py: Python<'_>, n: usize, k: usize) -> PyResult<Py<PyAny>> {
    to_object(py, &orbit::count_report(n, k).map_err(counting_err)?)
}

/// The reduced Poincaré function, as a string.
#[pyfunction]
fn poincare(n: usize) -> PyResult<String> {
    Ok(orbit::poincare(n).map_err(counting_err)?.to_string())
}

/// Orbit dimension of a random metric k-jet by exact rank.
#[pyfunction]
#[pyo3(signature = (n, k, seed=0))]
fn orbit_dim(py: Python<'_>, n: usize, k: usize, seed: u64) -> PyResult<Py<PyAny>> {
    to_object(py, &orbit::orbit_dim_bruteforce(n, k, seed).map_err(counting_err)?)
}

/// Invariant report of a metric given as file text.
#[pyfunction]
#[pyo3(signature = (text, max_order, seed=None))]
fn invariants(py: Python<'_>, text: &str, max_order: usize, seed: Option<u64>) -> PyResult<Py<PyAny>> {
    let spec = parse_metric(text).map_err(to_py)?;
    let metric = build_metric_jet(&spec).map_err(to_py)?;
    to_object(py, &invariant_report(&metric, max_order, seed).map_err(to_py)?)
}

/// Invariant report of a metric file.
#[pyfunction]
#[pyo3(signature = (path, max_order))]
fn invariants_from_file(py: Python<'_>, path: PathBuf, max_order: usize) -> PyResult<Py<PyAny>> {
    let (_, metric) = confinv::metric_io::load_metric(&path).map_err(to_py)?;
    to_object(py, &invariant_report(&metric, max_order, None).map_err(to_py)?)
}

/// Residuals of the invariants under a random point transformation and rescaling.
#[pyfunction]
#[pyo3(signature = (n, order, seed=0))]
fn invariance(py: Python<'_>, n: usize, order: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let sample = py.detach(|| invariance_check(n, order, seed)).map_err(to_py)?;
    to_object(py, &sample)
}

/// Jacobian rank of a standard invariant family.
#[pyfunction]
#[pyo3(signature = (n, k, seed=0, trials=MIN_TRIALS))]
fn independence(py: Python<'_>, n: usize, k: usize, seed: u64, trials: usize) -> PyResult<Py<PyAny>> {
    let family = standard_family(n, k).map_err(to_py)?;
    let report = py.detach(|| jacobian_rank(&family, seed, trials)).map_err(to_py)?;
    to_object(py, &report)
}

/// Runs a verification suite by name.
#[pyfunction]
#[pyo3(signature = (suite, dim, order=None, seed=0))]
fn verify(py: Python<'_>, suite: &str, dim: usize, order: Option<usize>, seed: u64) -> PyResult<Py<PyAny>> {
    let suite = Suite::from_str(suite, true).map_err(PyValueError::new_err)?;
    if suite.needs_order() && order.is_none() {
        return Err(PyValueError::new_err("this suite requires an order"));
    }
    let report = py.detach(|| confinv::cli::verify(suite, dim, order, seed)).map_err(to_py)?;
    to_object(py, &report)
}

#[pymodule]
#[pyo3(name = "confinv")]
pub fn confinv_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ConfinvError", m.py().get_type::<ConfinvError>())?;
    m.add_function(wrap_pyfunction!(hilbert, m)?)?;
    m.add_function(wrap_pyfunction!(trdeg, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(poincare, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_dim, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(invariants_from_file, m)?)?;
    m.add_function(wrap_pyfunction!(invariance, m)?)?;
    m.add_function(wrap_pyfunction!(independence, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
