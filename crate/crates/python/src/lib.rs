//! Python bindings: `import spinfreeze`.
//!
//! Matrices cross the boundary as nested lists of complex numbers.

use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use spinfreeze::discord::{self, DiscordOptions};
use spinfreeze::experiments::{self, ScenarioConfig, ScenarioRun};
use spinfreeze::hamiltonians::{self, TwoSpinParams};
use spinfreeze::linalg::{self, ComplexMatrix, LogBase, Subsystem};
use spinfreeze::Error;

fn to_py(e: Error) -> PyErr {
    match e.root() {
        Error::Config { .. } | Error::UnknownPreset { .. } => PyValueError::new_err(e.to_string()),
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn matrix(rows: Vec<Vec<C64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(to_py)
}

fn rows(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    let n = m.dim();
    (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect()
}

fn log_base(base: &str) -> PyResult<LogBase> {
    match base {
        "e" | "natural" => Ok(LogBase::Natural),
        "2" | "two" => Ok(LogBase::Two),
        other => Err(PyValueError::new_err(format!(
            "log base must be 'e' or '2', got {other:?}"
        ))),
    }
}

fn subsystem(which: &str) -> PyResult<Subsystem> {
    match which {
        "first" | "electron" => Ok(Subsystem::First),
        "second" | "nuclear" => Ok(Subsystem::Second),
        other => Err(PyValueError::new_err(format!(
            "measured must be 'first' or 'second', got {other:?}"
        ))),
    }
}

/// NV ground-state parameters (MHz, MHz/G, gauss).
#[pyclass(get_all, set_all, from_py_object)]
#[derive(Clone)]
struct NvParams {
    d: f64,
    ge_mub: f64,
    gn_mun: f64,
    a_par: f64,
    a_perp: f64,
    q: f64,
    b_z: f64,
}

impl From<&NvParams> for hamiltonians::NvParams {
    fn from(p: &NvParams) -> Self {
        Self {
            d: p.d,
            ge_mub: p.ge_mub,
            gn_mun: p.gn_mun,
            a_par: p.a_par,
            a_perp: p.a_perp,
            q: p.q,
            b_z: p.b_z,
        }
    }
}

#[pymethods]
impl NvParams {
    #[new]
    #[pyo3(signature = (b_z = None))]
    fn new(b_z: Option<f64>) -> Self {
        let p = hamiltonians::NvParams::default();
        Self {
            d: p.d,
            ge_mub: p.ge_mub,
            gn_mun: p.gn_mun,
            a_par: p.a_par,
            a_perp: p.a_perp,
            q: p.q,
            b_z: b_z.unwrap_or(p.b_z),
        }
    }

    /// (electron_g, electron_e, nuclear_g, nuclear_e) in MHz.
    fn transitions(&self) -> (f64, f64, f64, f64) {
        let t = hamiltonians::NvParams::from(self).transitions();
        (t.electron_g, t.electron_e, t.nuclear_g, t.nuclear_e)
    }

    /// Reduced 4x4 Hamiltonian, rad/us.
    fn reduced_hamiltonian(&self) -> PyResult<Vec<Vec<C64>>> {
        Ok(rows(
            &hamiltonians::nv_reduced_hamiltonian(&self.into()).map_err(to_py)?,
        ))
    }

    /// Full 9x9 Hamiltonian, rad/us.
    fn full_hamiltonian(&self) -> PyResult<Vec<Vec<C64>>> {
        Ok(rows(
            &hamiltonians::nv_ground_hamiltonian_full(&self.into()).map_err(to_py)?,
        ))
    }

    fn __repr__(&self) -> String {
        format!(
            "NvParams(b_z={}, d={}, a_par={}, q={})",
            self.b_z, self.d, self.a_par, self.q
        )
    }
}

/// Result of a scenario run.
#[pyclass(frozen)]
struct Run {
    inner: ScenarioRun,
}

#[pymethods]
impl Run {
    #[getter]
    fn name(&self) -> String {
        self.inner.config.name.clone()
    }

    /// us
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.series.times.clone()
    }

    /// P_gg, P_ge, P_eg, P_ee per recorded time.
    #[getter]
    fn populations(&self) -> PyResult<Vec<[f64; 4]>> {
        self.inner
            .series
            .populations
            .iter()
            .map(|p| experiments::subspace_populations(p).map_err(to_py))
            .collect()
    }

    #[getter]
    fn max_leakage(&self) -> f64 {
        self.inner.metrics.max_leakage
    }

    #[getter]
    fn mean_leakage(&self) -> f64 {
        self.inner.metrics.mean_leakage
    }

    /// (t, discord) pairs, or None when discord was not requested.
    #[getter]
    fn discord(&self) -> Option<Vec<(f64, f64)>> {
        self.inner
            .series
            .discord
            .as_ref()
            .map(|d| d.iter().map(|(t, r)| (*t, r.discord)).collect())
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    /// Density matrix at recorded index `k`.
    fn state(&self, k: usize) -> PyResult<Vec<Vec<C64>>> {
        let s = self
            .inner
            .series
            .states
            .get(k)
            .ok_or_else(|| PyValueError::new_err(format!("index {k} out of range")))?;
        Ok(rows(s))
    }

    fn __len__(&self) -> usize {
        self.inner.series.len()
    }
}

/// [(name, description)] of the built-in scenarios.
#[pyfunction]
fn list_presets() -> Vec<(String, String)> {
    experiments::PRESETS
        .iter()
        .map(|(n, d)| (n.to_string(), d.to_string()))
        .collect()
}

/// TOML configuration of a built-in scenario.
#[pyfunction]
fn preset_config(name: &str) -> PyResult<String> {
    experiments::preset(name).and_then(|c| c.to_toml()).map_err(to_py)
}

/// Runs a built-in scenario by name, or a TOML configuration string.
#[pyfunction]
#[pyo3(signature = (scenario, seed = None, t_end = None, discord = None))]
fn run_scenario(
    py: Python<'_>,
    scenario: &str,
    seed: Option<u64>,
    t_end: Option<f64>,
    discord: Option<bool>,
) -> PyResult<Run> {
    let mut cfg = if scenario.contains('=') {
        ScenarioConfig::from_toml(scenario)
    } else {
        experiments::preset(scenario)
    }
    .map_err(to_py)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = t_end {
        cfg.grid.t_end = t;
    }
    if let Some(d) = discord {
        cfg.outputs.discord = d;
    }
    let inner = py.detach(|| experiments::run_scenario(&cfg)).map_err(to_py)?;
    Ok(Run { inner })
}

/// Discord with measurement on `measured`; returns (discord, mutual_info, classical_corr).
#[pyfunction]
#[pyo3(signature = (rho, measured = "first", base = "e"))]
fn quantum_discord(rho: Vec<Vec<C64>>, measured: &str, base: &str) -> PyResult<(f64, f64, f64)> {
    let opts = DiscordOptions {
        measured: subsystem(measured)?,
        log_base: log_base(base)?,
        ..DiscordOptions::default()
    };
    let r = discord::quantum_discord(&matrix(rho)?, &opts).map_err(to_py)?;
    Ok((r.discord, r.mutual_info, r.classical_corr))
}

#[pyfunction]
#[pyo3(signature = (rho, base = "e"))]
fn mutual_information(rho: Vec<Vec<C64>>, base: &str) -> PyResult<f64> {
    discord::mutual_information(&matrix(rho)?, log_base(base)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (rho, base = "e"))]
fn vn_entropy(rho: Vec<Vec<C64>>, base: &str) -> PyResult<f64> {
    linalg::vn_entropy(&matrix(rho)?, log_base(base)?).map_err(to_py)
}

/// Abstract two-spin Hamiltonian (rad/us).
#[pyfunction]
#[pyo3(signature = (omega_1, omega_2, v0, delta_1 = 0.0, delta_2 = 0.0))]
fn two_spin_hamiltonian(omega_1: f64, omega_2: f64, v0: f64, delta_1: f64, delta_2: f64) -> PyResult<Vec<Vec<C64>>> {
    let p = TwoSpinParams {
        delta_1,
        delta_2,
        omega_1,
        omega_2,
        v0,
    };
    Ok(rows(
        &hamiltonians::two_spin_hamiltonian(&p).map_err(to_py)?.static_part,
    ))
}

#[pymodule]
#[pyo3(name = "spinfreeze")]
fn spinfreeze_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<NvParams>()?;
    m.add_class::<Run>()?;
    m.add_function(wrap_pyfunction!(list_presets, m)?)?;
    m.add_function(wrap_pyfunction!(preset_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_discord, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(vn_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(two_spin_hamiltonian, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
