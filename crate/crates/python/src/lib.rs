//! Python module `pyraywave`: configs in and out as TOML text, results as
//! plain lists and dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::path::Path;

use raywave::diagnostics::{intensity_profile, uncertainty_product, waist_trajectory as waist};
use raywave::dynamics::TrajectoryRecord;
use raywave::io::{emit_config, exit_code_for, parse_config_str, preset_config, run_scenario, verify_record, PRESETS};
use raywave::model::ScenarioConfig;
use raywave::oracle::{lift_profile, propagate, GridSpec};
use raywave::Error;

fn py_err(e: Error) -> PyErr {
    match exit_code_for(&e) {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Parse a scenario, optionally switching coupling off.
pub fn load(config: &str, coupling: Option<bool>) -> raywave::Result<ScenarioConfig> {
    let mut c = parse_config_str(config)?;
    if let Some(on) = coupling {
        let default_dt = c.dt == c.default_dt();
        c.coupling_enabled = on;
        if default_dt {
            c.dt = c.default_dt();
        }
    }
    Ok(c)
}

/// Final-front columns of a record.
pub fn final_front(record: &TrajectoryRecord) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let last = record.last();
    let x = last.xs();
    let px = last.rays.iter().map(|r| r.px).collect();
    let intensity = intensity_profile(last).into_iter().map(|p| p.1).collect();
    (x, px, intensity)
}

/// Names of the built-in presets.
#[pyfunction]
fn presets() -> Vec<&'static str> {
    PRESETS.to_vec()
}

/// Full TOML text of a preset.
#[pyfunction]
fn preset_toml(name: &str) -> PyResult<String> {
    preset_config(name).map(|c| emit_config(&c)).map_err(py_err)
}

/// Closed-form width of the unit Gaussian beam.
#[pyfunction]
fn waist_trajectory(epsilon: f64, z: f64) -> f64 {
    waist(epsilon, z)
}

/// Run a scenario and write its files to `out_dir`.
#[pyfunction]
#[pyo3(signature = (config, out_dir, coupling=None))]
fn run<'py>(py: Python<'py>, config: &str, out_dir: &str, coupling: Option<bool>) -> PyResult<Bound<'py, PyDict>> {
    let c = load(config, coupling).map_err(py_err)?;
    let dir = Path::new(out_dir).to_path_buf();
    let outcome = py.detach(move || run_scenario(c, &dir)).map_err(py_err)?;
    let r = &outcome.record;
    let (x, px, intensity) = final_front(r);
    let d = PyDict::new(py);
    d.set_item("exit_code", outcome.exit_code)?;
    d.set_item("termination", r.termination.as_str())?;
    d.set_item("steps", r.steps)?;
    d.set_item("t", r.last().t)?;
    d.set_item("z", r.last().mean_z())?;
    d.set_item("launch_x", r.launch_xs())?;
    d.set_item("x", x)?;
    d.set_item("px", px)?;
    d.set_item("intensity", intensity)?;
    d.set_item("max_flux_drift", r.max_flux_drift)?;
    d.set_item("uncertainty_product", uncertainty_product(r).ok().map(|u| u.product))?;
    Ok(d)
}

/// Run a vacuum scenario against the wave oracle; the report as JSON text.
#[pyfunction]
#[pyo3(signature = (config, coupling=None))]
fn verify(py: Python<'_>, config: &str, coupling: Option<bool>) -> PyResult<String> {
    let c = load(config, coupling).map_err(py_err)?;
    let report = py
        .detach(move || raywave::dynamics::run(c).and_then(|r| verify_record(&r)))
        .map_err(py_err)?;
    serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Intensity of the propagated launch field at `z`, unit peak.
#[pyfunction]
fn oracle_intensity(config: &str, z: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let c = load(config, None).map_err(py_err)?;
    let field = lift_profile(&c.profile, GridSpec::for_scenario(&c, z), c.epsilon)
        .and_then(|f| propagate(&f, z))
        .map_err(py_err)?;
    let i = field.intensity();
    let peak = i.iter().cloned().fold(0.0, f64::max);
    Ok((field.xs(), i.into_iter().map(|v| v / peak).collect()))
}

#[pymodule]
fn pyraywave(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(preset_toml, m)?)?;
    m.add_function(wrap_pyfunction!(waist_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_intensity, m)?)?;
    Ok(())
}
