//! Python bindings for the `ylab` core crate.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ylab::data::{self, DataSpec};
use ylab::diagnostics;
use ylab::exact;
use ylab::field::{self, FieldKind, GradientScheme};
use ylab::solver::{self, SolverConfig};
use ylab::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_) | Error::Domain(_) | Error::Config(_) | Error::NotMeanZero { .. } => {
            PyValueError::new_err(e.to_string())
        }
        Error::Io(_) | Error::Format { .. } => PyOSError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_kind(kind: &str) -> PyResult<FieldKind> {
    match kind {
        "scalar" => Ok(FieldKind::Scalar),
        "vorticity" => Ok(FieldKind::Vorticity),
        other => Err(PyValueError::new_err(format!("unknown field kind {other:?}"))),
    }
}

fn parse_data(kind: &str, beta: f64, gamma: f64) -> PyResult<DataSpec> {
    let mut spec = match kind {
        "theorem" => DataSpec::theorem(beta),
        "bahouri_chemin" => DataSpec::bahouri_chemin(),
        "h1_log" => DataSpec::h1_log(gamma),
        "taylor_green" => DataSpec::taylor_green(),
        other => return Err(PyValueError::new_err(format!("unknown data kind {other:?}"))),
    };
    spec.beta = beta;
    Ok(spec)
}

/// Periodic samples on `[-1,1)^2`, row-major with `x2` fastest.
#[pyclass(name = "GridField", module = "ylab_py", skip_from_py_object)]
#[derive(Clone)]
struct PyGridField {
    inner: field::GridField,
}

#[pymethods]
impl PyGridField {
    #[new]
    #[pyo3(signature = (n, values, kind = "scalar"))]
    fn new(n: usize, values: Vec<f64>, kind: &str) -> PyResult<Self> {
        let inner = field::GridField::new(n, values, parse_kind(kind)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (path, kind = "scalar"))]
    fn load(path: PathBuf, kind: &str) -> PyResult<Self> {
        let inner = field::read_ylf(path, parse_kind(kind)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        field::write_ylf(path, &self.inner).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.h()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner.kind() {
            FieldKind::Vorticity => "vorticity",
            _ => "scalar",
        }
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        let n = self.inner.n();
        if i >= n || j >= n {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.get(i, j))
    }

    fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    fn lp_norm(&self, p: f64) -> PyResult<f64> {
        field::lp_norm(&self.inner, p).map_err(to_py)
    }

    fn w1p_norm(&self, p: f64) -> PyResult<f64> {
        field::w1p_norm(&self.inner, p, GradientScheme::CentralDifference).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("GridField(n={}, kind={})", self.inner.n(), self.kind())
    }
}

fn wrap(inner: field::GridField) -> PyGridField {
    PyGridField { inner }
}

#[pyfunction]
#[pyo3(signature = (kind, n, beta = 0.25, gamma = 1.0))]
fn make_data(kind: &str, n: usize, beta: f64, gamma: f64) -> PyResult<PyGridField> {
    let spec = parse_data(kind, beta, gamma)?;
    data::make_data(&spec, n).map(wrap).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (kind, beta = 0.25, gamma = 1.0))]
fn classify_p0(kind: &str, beta: f64, gamma: f64) -> PyResult<f64> {
    data::classify_p0(&parse_data(kind, beta, gamma)?).map_err(to_py)
}

/// Velocity components `(u1, u2)` of a vorticity field.
#[pyfunction]
fn biot_savart(omega: &PyGridField) -> PyResult<(PyGridField, PyGridField)> {
    let w = omega.inner.clone().with_kind(FieldKind::Vorticity).map_err(to_py)?;
    let u = field::biot_savart(&w).map_err(to_py)?;
    Ok((wrap(u.u1), wrap(u.u2)))
}

/// `(t, l1, l2, linf, energy)`
type DiagnosticsTuple = (f64, f64, f64, f64, f64);
type RunOutput = (Vec<(f64, PyGridField)>, Vec<DiagnosticsTuple>);

/// Evolves `omega`; returns the snapshots and rows `(t, l1, l2, linf, energy)`.
#[pyfunction]
#[pyo3(signature = (omega, dt, t_end, snapshot_times = None))]
fn run(
    omega: &PyGridField,
    dt: f64,
    t_end: f64,
    snapshot_times: Option<Vec<f64>>,
) -> PyResult<RunOutput> {
    let w = omega.inner.clone().with_kind(FieldKind::Vorticity).map_err(to_py)?;
    let mut cfg = SolverConfig::new(w.n(), dt, t_end);
    if let Some(ts) = snapshot_times {
        cfg = cfg.with_snapshots(ts);
    }
    let rec = solver::run(&w, &cfg).map_err(to_py)?;
    let diag = rec
        .diagnostics
        .iter()
        .map(|d| (d.t, d.l1, d.l2, d.linf, d.energy))
        .collect();
    let snaps = rec.snapshots.into_iter().map(|(t, f)| (t, wrap(f))).collect();
    Ok((snaps, diag))
}

#[pyfunction]
fn toy_trajectory(x0: [f64; 2], t: f64) -> PyResult<[f64; 2]> {
    exact::toy_trajectory(x0, t).map_err(to_py)
}

#[pyfunction]
fn gamma_exponent(t: f64) -> f64 {
    exact::gamma_exponent(t)
}

#[pyfunction]
fn model_q(t: f64) -> f64 {
    exact::model_q(t)
}

#[pyfunction]
fn origin_gradient_estimate(t: f64) -> PyResult<f64> {
    exact::origin_gradient_estimate(t).map_err(to_py)
}

#[pyfunction]
fn key_integral(omega: &PyGridField, x: [f64; 2]) -> PyResult<f64> {
    diagnostics::key_integral(&omega.inner, x).map(|k| k.value).map_err(to_py)
}

/// `(radii, theta_lo, theta_hi)`; radii where the level is not reached are dropped.
#[pyfunction]
#[pyo3(signature = (f, radii, level, tol = 0.0))]
fn level_set_gap(f: &PyGridField, radii: Vec<f64>, level: f64, tol: f64) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let p = diagnostics::level_set_gap(&f.inner, &radii, level, tol).map_err(to_py)?;
    Ok((p.radii, p.theta_star, p.theta_star_hi))
}

/// Critical index `(p_hat, lo, hi)` of named initial data over `resolutions`.
#[pyfunction]
#[pyo3(signature = (kind, resolutions, p_grid, beta = 0.25, gamma = 1.0))]
fn critical_index(kind: &str, resolutions: Vec<usize>, p_grid: Vec<f64>, beta: f64, gamma: f64) -> PyResult<(f64, f64, f64)> {
    let spec = parse_data(kind, beta, gamma)?;
    let ci = diagnostics::critical_index(|n| data::make_data(&spec, n), &p_grid, &resolutions).map_err(to_py)?;
    Ok((ci.p_hat, ci.lo, ci.hi))
}

#[pymodule]
fn ylab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGridField>()?;
    m.add_function(wrap_pyfunction!(make_data, m)?)?;
    m.add_function(wrap_pyfunction!(classify_p0, m)?)?;
    m.add_function(wrap_pyfunction!(biot_savart, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(toy_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(model_q, m)?)?;
    m.add_function(wrap_pyfunction!(origin_gradient_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(key_integral, m)?)?;
    m.add_function(wrap_pyfunction!(level_set_gap, m)?)?;
    m.add_function(wrap_pyfunction!(critical_index, m)?)?;
    Ok(())
}
