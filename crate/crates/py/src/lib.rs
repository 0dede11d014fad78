//! Python bindings: single runs, sweeps, exact Riemann solutions and the
//! Godunov reference. Arrays cross the boundary as lists of floats.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use singlim::harness::{self, Config};
use singlim::integrator::{evolve, Guards, RunConfig};
use singlim::oracle::{self, fan_value, riemann_fan_with};
use singlim::spectral::lp_norm as core_lp_norm;
use singlim::{make_grid, Error, Field, FluxConvention, InitialData, ModelKind, ModelSpec, Profile};

fn to_py(e: Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn model_kind(name: &str) -> PyResult<ModelKind> {
    [ModelKind::Burgers, ModelKind::Rosenau, ModelKind::RosenauRlw, ModelKind::RosenauKdvRlw, ModelKind::Kdv]
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown model kind `{name}`")))
}

fn flux(name: &str) -> PyResult<FluxConvention> {
    [FluxConvention::FullSquare, FluxConvention::HalfSquare]
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown flux convention `{name}`")))
}

#[pyclass(name = "Model", frozen, from_py_object)]
#[derive(Clone)]
struct PyModel {
    inner: ModelSpec,
}

#[pymethods]
impl PyModel {
    #[new]
    fn new(kind: &str, epsilon: f64, beta: f64) -> PyResult<Self> {
        Ok(Self { inner: ModelSpec::new(model_kind(kind)?, epsilon, beta).map_err(to_py)? })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.name()
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }

    #[getter]
    fn flux_convention(&self) -> &'static str {
        self.inner.flux_convention.name()
    }

    fn __repr__(&self) -> String {
        format!("Model('{}', epsilon={}, beta={})", self.kind(), self.inner.epsilon, self.inner.beta)
    }
}

#[pyclass(name = "Trajectory", frozen)]
struct PyTrajectory {
    #[pyo3(get)]
    x: Vec<f64>,
    #[pyo3(get)]
    times: Vec<f64>,
    #[pyo3(get)]
    fields: Vec<Vec<f64>>,
    #[pyo3(get)]
    energy_drift: f64,
    #[pyo3(get)]
    steps: usize,
    /// Grid mean of every sample.
    #[pyo3(get)]
    means: Vec<f64>,
}

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn final_values(&self) -> Vec<f64> {
        self.fields.last().cloned().unwrap_or_default()
    }
}

/// Evolve mollified Riemann data `(u_left, u_right)` jumping at 0.
#[pyfunction]
#[pyo3(signature = (model, n_modes=1024, half_length=10.0, horizon=0.5, samples=64, u_left=1.0, u_right=0.0, width=None, cfl_safety=0.4))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    model: PyModel,
    n_modes: usize,
    half_length: f64,
    horizon: f64,
    samples: usize,
    u_left: f64,
    u_right: f64,
    width: Option<f64>,
    cfl_safety: f64,
) -> PyResult<PyTrajectory> {
    let m = model.inner;
    let rc = RunConfig {
        model: m,
        n_modes,
        half_length,
        initial: InitialData {
            profile: Profile::MollifiedRiemann { u_left, u_right, x_jump: 0.0 },
            mollifier_width: width.unwrap_or_else(|| m.epsilon.max(m.beta).powf(0.25)),
            c0: 100.0,
        },
        horizon,
        cfl_safety,
        sample_times: RunConfig::uniform_samples(horizon, samples),
        record_time_derivatives: false,
        guards: Guards::default(),
    };
    let traj = py.detach(|| evolve(&rc)).map_err(to_py)?;
    let norms = singlim::estimates::collect_norms(&traj, &m);
    let g = traj.fields[0].grid();
    Ok(PyTrajectory {
        x: (0..g.n_modes).map(|i| -half_length + i as f64 * g.spacing).collect(),
        times: traj.times.clone(),
        fields: traj.fields.iter().map(|f| f.values().to_vec()).collect(),
        energy_drift: norms.energy_drift(),
        steps: traj.stats.steps,
        means: traj.fields.iter().map(Field::mean).collect(),
    })
}

#[pyclass(name = "SweepResult", frozen)]
struct PySweepResult {
    #[pyo3(get)]
    epsilons: Vec<f64>,
    #[pyo3(get)]
    betas: Vec<f64>,
    /// L1 error per row against the primary limit flux; `None` for failed rows.
    #[pyo3(get)]
    errors: Vec<Option<f64>>,
    #[pyo3(get)]
    matched_flux: Option<&'static str>,
    #[pyo3(get)]
    table_csv: String,
}

/// Run the sweep described by a TOML config; writes nothing.
#[pyfunction]
fn sweep(py: Python<'_>, config_path: PathBuf) -> PyResult<PySweepResult> {
    let config = Config::load(&config_path).map_err(to_py)?;
    let plan = config.plan().map_err(to_py)?;
    let sr = py.detach(|| harness::run_sweep(&plan)).map_err(to_py)?;
    Ok(PySweepResult {
        epsilons: sr.rows.iter().map(|r| r.epsilon).collect(),
        betas: sr.rows.iter().map(|r| r.beta).collect(),
        errors: sr.primary_errors(),
        matched_flux: sr.matched_flux().map(FluxConvention::name),
        table_csv: harness::convergence_table(&sr).to_csv(),
    })
}

/// Exact entropy solution of a Riemann problem centred at 0, sampled at `x`.
#[pyfunction]
#[pyo3(signature = (u_left, u_right, t, x, flux_convention="full_square"))]
fn riemann_solution(u_left: f64, u_right: f64, t: f64, x: Vec<f64>, flux_convention: &str) -> PyResult<Vec<f64>> {
    if !(t > 0.0) {
        return Err(PyValueError::new_err("t must be positive"));
    }
    let fan = riemann_fan_with(u_left, u_right, flux(flux_convention)?);
    Ok(x.iter().map(|&xi| fan_value(&fan, xi / t)).collect())
}

/// Godunov entropy reference on `[-L, L)` for sharp Riemann data supported in
/// `[-L/2, L/2]`; returns `(cell centres, cell averages)`.
#[pyfunction]
#[pyo3(signature = (u_left, u_right, half_length, t, spacing, flux_convention="full_square"))]
fn entropy_reference(
    py: Python<'_>,
    u_left: f64,
    u_right: f64,
    half_length: f64,
    t: f64,
    spacing: f64,
    flux_convention: &str,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let initial = InitialData {
        profile: Profile::MollifiedRiemann { u_left, u_right, x_jump: 0.0 },
        mollifier_width: 0.0,
        c0: 100.0,
    };
    let conv = flux(flux_convention)?;
    let r = py.detach(|| oracle::entropy_reference(&initial, half_length, conv, t, spacing)).map_err(to_py)?;
    Ok(((0..r.cells.len()).map(|i| r.center(i)).collect(), r.cells))
}

/// Quadrature `L^p` norm of grid values on `[-L, L)`; `p` is 1, 2, 4 or `inf`.
#[pyfunction]
fn lp_norm(values: Vec<f64>, half_length: f64, p: f64) -> PyResult<f64> {
    let g = make_grid(values.len(), half_length).map_err(to_py)?;
    let f = Field::from_values(&g, values).map_err(to_py)?;
    core_lp_norm(&f, p).map_err(to_py)
}

#[pymodule]
fn singlim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PySweepResult>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(riemann_solution, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_reference, m)?)?;
    m.add_function(wrap_pyfunction!(lp_norm, m)?)?;
    Ok(())
}
