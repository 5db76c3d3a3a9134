use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module<T>(f: impl FnOnce(&Bound<'_, PyModule>) -> PyResult<T>) -> T {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "confinv").unwrap();
        confinv_py::confinv_py(&m).unwrap();
        f(&m).unwrap()
    })
}

#[test]
fn counting_functions() {
    let h: i64 = with_module(|m| m.getattr("hilbert")?.call1((4, 4))?.extract());
    assert_eq!(h, 91);
    let t: i64 = with_module(|m| m.getattr("trdeg")?.call1((3, 4))?.extract());
    assert_eq!(t, 10);
}

#[test]
fn domain_errors_carry_reason_and_module() {
    let args: (String, String, String) = with_module(|m| {
        let err = m.getattr("hilbert")?.call1((2, 3)).unwrap_err();
        err.value(m.py()).getattr("args")?.extract()
    });
    assert_eq!(args.0, "DimensionTooSmall");
    assert_eq!(args.1, "orbit_counting");
}

#[test]
fn reports_are_dicts() {
    let rank: usize = with_module(|m| {
        let r = m.getattr("orbit_dim")?.call1((3, 2))?;
        r.cast::<PyDict>()?.get_item("rank")?.unwrap().extract()
    });
    assert_eq!(rank, 60);
}

#[test]
fn unknown_suite_is_a_value_error() {
    let is_value_error = with_module(|m| {
        let err = m.getattr("verify")?.call1(("nonsense", 3)).unwrap_err();
        Ok(err.is_instance_of::<pyo3::exceptions::PyValueError>(m.py()))
    });
    assert!(is_value_error);
}
