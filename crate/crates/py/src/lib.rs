#![allow(clippy::useless_conversion)] // pyo3 0.22 macro expansion

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError, PyValueError};
use pyo3::prelude::*;

use num_complex::Complex64;
use thirring_core::correlations;
use thirring_core::io::{execute, Command, EdTask, ScenarioConfig};
use thirring_core::lattice::{self, Boundary, FockSystem, LatticeParams, Sector};
use thirring_core::params::{OpticalConfig, PolaritonParams, RegimeThresholds};
use thirring_core::{atlas, params, Error};

create_exception!(thirring, SingularityError, PyValueError);
create_exception!(thirring, NumericalError, PyException);

fn to_py(err: Error) -> PyErr {
    let msg = err.to_string();
    match err.exit_code() {
        3 => SingularityError::new_err(msg),
        4 => NumericalError::new_err(msg),
        5 => PyOSError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn parse_command(name: &str) -> PyResult<Command> {
    Ok(match name {
        "params" => Command::Params,
        "sweep" => Command::Sweep,
        "correlate" => Command::Correlate,
        "evolve" => Command::Evolve,
        "ed ground" => Command::Ed(EdTask::Ground),
        "ed correlate" => Command::Ed(EdTask::Correlate),
        "ed check-identity" => Command::Ed(EdTask::CheckIdentity),
        "ed check-fermionization" => Command::Ed(EdTask::CheckFermionization),
        other => return Err(PyValueError::new_err(format!("unknown command `{other}`"))),
    })
}

fn parse_boundary(name: &str) -> PyResult<Boundary> {
    match name {
        "periodic" => Ok(Boundary::Periodic),
        "open" => Ok(Boundary::Open),
        "antiperiodic" => Ok(Boundary::Antiperiodic),
        other => Err(PyValueError::new_err(format!("unknown boundary `{other}`"))),
    }
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(format!("invalid {what}: {e}")))
}

/// Raw optical knobs; frequencies in units of the linewidth.
#[pyclass(name = "OpticalConfig", module = "thirring")]
#[derive(Clone)]
struct PyOptical {
    inner: OpticalConfig,
}

#[pymethods]
impl PyOptical {
    #[staticmethod]
    fn reference() -> Self {
        PyOptical { inner: OpticalConfig::slow_light_reference() }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: OpticalConfig = from_json(text, "optical config")?;
        inner.validate().map_err(to_py)?;
        Ok(PyOptical { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("config serializes")
    }

    fn derive(&self) -> PyResult<PyParams> {
        Ok(PyParams { inner: params::derive_params(&self.inner).map_err(to_py)? })
    }

    /// `(kappa_total, coherence_time)` in 1/s and s.
    fn losses(&self) -> PyResult<(f64, Option<f64>)> {
        let l = params::loss_rates(&self.inner).map_err(to_py)?;
        Ok((l.kappa_total, l.coherence_time))
    }

    fn __repr__(&self) -> String {
        format!("OpticalConfig({})", self.to_json())
    }
}

/// Derived field-theory parameters in SI units.
#[pyclass(name = "PolaritonParams", module = "thirring", frozen)]
struct PyParams {
    inner: PolaritonParams,
}

#[pymethods]
impl PyParams {
    #[getter]
    fn eta(&self) -> [f64; 2] {
        self.inner.eta
    }

    #[getter]
    fn m_nr(&self) -> [f64; 2] {
        self.inner.m_nr
    }

    #[getter]
    fn v(&self) -> [f64; 2] {
        self.inner.v
    }

    #[getter]
    fn chi_same(&self) -> [f64; 2] {
        self.inner.chi_same
    }

    #[getter]
    fn chi_cross(&self) -> [f64; 2] {
        self.inner.chi_cross
    }

    #[getter]
    fn chi_tm(&self) -> f64 {
        self.inner.chi_tm
    }

    fn chi_over_eta(&self) -> PyResult<f64> {
        self.inner.chi_over_eta().map_err(to_py)
    }

    fn interaction_ratio(&self) -> PyResult<[f64; 2]> {
        params::interaction_ratio(&self.inner).map_err(to_py)
    }

    fn kinetic_ratio(&self, z_extent: f64) -> PyResult<[f64; 2]> {
        params::kinetic_ratio(&self.inner, z_extent).map_err(to_py)
    }

    #[pyo3(signature = (ratio_min = 10.0, beta_min = 10.0))]
    fn regime(&self, ratio_min: f64, beta_min: f64) -> PyResult<String> {
        let t = RegimeThresholds { ratio_min, beta_min };
        Ok(params::classify_regime(&self.inner, &t).map_err(to_py)?.to_string())
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("params serialize")
    }
}

/// Fock-space lattice system with its ground state.
#[pyclass(name = "LatticeSystem", module = "thirring", frozen)]
struct PyLattice {
    system: FockSystem,
    ground: lattice::GroundState,
}

#[pymethods]
impl PyLattice {
    /// `params_json` holds lattice couplings; `sector_json` is e.g.
    /// `{"total": 2}` or `{"species": [2, 0]}`.
    #[new]
    fn new(params_json: &str, sector_json: &str) -> PyResult<Self> {
        let p: LatticeParams = from_json(params_json, "lattice params")?;
        let sector: Sector = from_json(sector_json, "sector")?;
        let system = FockSystem::new(p, sector).map_err(to_py)?;
        let ground = lattice::ground_state(&system).map_err(to_py)?;
        Ok(PyLattice { system, ground })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.system.dim()
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.ground.energy
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.ground.residual
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.ground.state.amplitudes.clone()
    }

    /// Ground-state `<n_{s,i} n_{t,j}>` as an M x M nested list.
    fn density_block(&self, s: usize, t: usize) -> PyResult<Vec<Vec<f64>>> {
        if s > 1 || t > 1 {
            return Err(PyValueError::new_err("species index must be 0 or 1"));
        }
        Ok(lattice::density_correlations(&self.ground.state, &self.system).block(s, t))
    }

    /// Ground-state `<S+_i S-_j>`.
    fn spin_table(&self) -> Vec<Vec<Complex64>> {
        let t = lattice::spin_correlations(&self.ground.state, &self.system);
        (0..t.sites).map(|i| (0..t.sites).map(|j| t.get(i, j)).collect()).collect()
    }

    fn identity_residual(&self) -> f64 {
        lattice::detection_identity_residual(&self.ground.state, &self.system)
    }
}

/// Run a CLI command on a JSON scenario without writing files. Returns the
/// JSON summary as a string.
#[pyfunction]
#[pyo3(signature = (command, config_json, overrides = Vec::new()))]
fn run(command: &str, config_json: &str, overrides: Vec<String>) -> PyResult<String> {
    let cmd = parse_command(command)?;
    let cfg = ScenarioConfig::from_json_str(config_json, &overrides).map_err(to_py)?;
    let report = execute(cmd, &cfg).map_err(to_py)?;
    Ok(report.summary.to_string())
}

/// Λ in 1/m.
#[pyfunction]
fn momentum_cutoff(chi_over_eta: f64, n_ph: f64) -> PyResult<f64> {
    params::momentum_cutoff(chi_over_eta, n_ph).map_err(to_py)
}

#[pyfunction]
fn correlation_exponent(chi_over_eta: f64) -> PyResult<f64> {
    correlations::correlation_exponent(chi_over_eta).map_err(to_py)
}

#[pyfunction]
fn two_point(d: f64, chi_over_eta: f64, n_ph: f64) -> PyResult<f64> {
    correlations::two_point(d, chi_over_eta, n_ph).map_err(to_py)
}

#[pyfunction]
fn n_point(z: Vec<f64>, z_prime: Vec<f64>, chi_over_eta: f64, n_ph: f64, scale_m: f64) -> PyResult<f64> {
    correlations::n_point(&z, &z_prime, chi_over_eta, n_ph, scale_m).map_err(to_py)
}

/// `(chi_over_eta, cutoff / (pi n_ph))` sampled on `points` values.
#[pyfunction]
#[pyo3(signature = (points = 201))]
fn cutoff_curve(points: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let s = atlas::sweep_cutoff(points, 1.0).map_err(to_py)?;
    Ok((s.separations, s.values))
}

/// Rows `(u_over_j, energy, deviation)`; the last row is the hardcore
/// limit with `u_over_j = inf`.
#[pyfunction]
#[pyo3(signature = (sites, particles, u_over_j, hopping = 1.0, boundary = "periodic"))]
fn fermionization(
    sites: usize,
    particles: usize,
    u_over_j: Vec<f64>,
    hopping: f64,
    boundary: &str,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let b = parse_boundary(boundary)?;
    let r = lattice::fermionization_check(sites, particles, hopping, &u_over_j, b).map_err(to_py)?;
    Ok(r.rows.iter().chain([&r.hardcore]).map(|row| (row.u_over_j, row.energy, row.deviation)).collect())
}

#[pymodule]
fn thirring(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SingularityError", m.py().get_type_bound::<SingularityError>())?;
    m.add("NumericalError", m.py().get_type_bound::<NumericalError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyOptical>()?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyLattice>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(momentum_cutoff, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(two_point, m)?)?;
    m.add_function(wrap_pyfunction!(n_point, m)?)?;
    m.add_function(wrap_pyfunction!(cutoff_curve, m)?)?;
    m.add_function(wrap_pyfunction!(fermionization, m)?)?;
    Ok(())
}
