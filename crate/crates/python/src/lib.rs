use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rqchannel::capacity::{classical_capacity, coherent_information_with, DEFAULT_RESTARTS, DEFAULT_SEED};
use rqchannel::channel_algebra::{apply_channel, choi, kraus_set, DensityMatrix2, RANK_THRESHOLD};
use rqchannel::scenario::{classify_separation, FieldSpec, ScenarioSpec, SwitchingSpec};
use rqchannel::{channel_params as cp, config, scan, vacuum, Error, ErrorKind};

create_exception!(rqchannel_py, PhysicsError, PyException);
create_exception!(rqchannel_py, ConvergenceError, PyException);

fn to_py(e: Error) -> PyErr {
    match e.kind() {
        ErrorKind::Config => PyValueError::new_err(e.to_string()),
        ErrorKind::Physics => PhysicsError::new_err(e.to_string()),
        ErrorKind::Convergence => ConvergenceError::new_err(e.to_string()),
    }
}

/// Two pointlike detectors on the x axis coupled to a scalar field.
#[pyclass(name = "Scenario", skip_from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: ScenarioSpec,
}

#[pymethods]
impl PyScenario {
    #[new]
    #[pyo3(signature = (separation=1.0, start=0.0, end=1.0, gap=1.0, coupling=0.1, mass=0.0, switching="bump", ramp=0.1))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        separation: f64,
        start: f64,
        end: f64,
        gap: f64,
        coupling: f64,
        mass: f64,
        switching: &str,
        ramp: f64,
    ) -> PyResult<Self> {
        let mut s = ScenarioSpec::simple(separation, start, end, gap, coupling);
        s.field = FieldSpec { mass };
        s.switching = match switching {
            "bump" => SwitchingSpec::bump(start, end),
            "tophat" => SwitchingSpec::smoothed_tophat(start, end, ramp),
            // start/end read as center and width
            "gaussian" => SwitchingSpec::gaussian(start, end),
            other => return Err(PyValueError::new_err(format!("unknown switching {other:?}"))),
        };
        s.validate().map_err(to_py)?;
        Ok(PyScenario { inner: s })
    }

    /// Parses a scenario file's contents.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(PyScenario {
            inner: config::parse_scenario(text).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(PyScenario {
            inner: config::load_scenario(&path).map_err(to_py)?,
        })
    }

    #[getter]
    fn separation(&self) -> f64 {
        self.inner.separation()
    }

    #[getter]
    fn gap(&self) -> f64 {
        self.inner.gap
    }

    #[getter]
    fn window(&self) -> (f64, f64) {
        (self.inner.switching.start, self.inner.switching.end)
    }

    /// "spacelike", "mixed" or "timelike".
    fn separation_class(&self) -> PyResult<&'static str> {
        classify_separation(&self.inner).map(|s| s.as_str()).map_err(to_py)
    }

    fn with_couplings(&self, alpha1: f64, alpha2: f64) -> Self {
        PyScenario {
            inner: self.inner.clone().with_couplings(alpha1, alpha2),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(L={}, window=({}, {}), gap={})",
            self.inner.separation(),
            self.inner.switching.start,
            self.inner.switching.end,
            self.inner.gap
        )
    }
}

/// The five channel parameters `P_e, A, B, C, D`.
#[pyclass(name = "ChannelParams", skip_from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: cp::ChannelParams,
}

#[pymethods]
impl PyParams {
    #[new]
    fn new(pe: f64, a: f64, b: f64, c: Complex64, d: Complex64) -> Self {
        PyParams {
            inner: cp::ChannelParams::new(pe, a, b, c, d),
        }
    }

    #[getter]
    fn pe(&self) -> f64 {
        self.inner.pe
    }
    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }
    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }
    #[getter]
    fn c(&self) -> Complex64 {
        self.inner.c
    }
    #[getter]
    fn d(&self) -> Complex64 {
        self.inner.d
    }
    #[getter]
    fn uncertainties(&self) -> [f64; 5] {
        self.inner.meta.uncertainties
    }
    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.meta.warnings.clone()
    }

    /// Output `(theta, gamma)` for input excited population `theta` and coherence `gamma`.
    fn apply(&self, theta: f64, gamma: Complex64) -> PyResult<(f64, Complex64)> {
        let rho = DensityMatrix2::new(theta, gamma).map_err(to_py)?;
        let out = apply_channel(&self.inner, &rho).map_err(to_py)?;
        Ok((out.theta(), out.gamma()))
    }

    /// Kraus operators as nested 2x2 lists.
    fn kraus(&self) -> PyResult<Vec<[[Complex64; 2]; 2]>> {
        let k = kraus_set(&self.inner).map_err(to_py)?;
        Ok(k.ops
            .iter()
            .map(|m| [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]])
            .collect())
    }

    fn choi_eigenvalues(&self) -> [f64; 4] {
        choi(&self.inner).eigenvalues()
    }

    #[pyo3(signature = (threshold=RANK_THRESHOLD))]
    fn choi_rank(&self, threshold: f64) -> usize {
        choi(&self.inner).rank(threshold)
    }

    /// Product-state classical capacity as a dict.
    fn capacity<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let c = classical_capacity(&self.inner).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("bits", c.bits)?;
        d.set_item("nats", c.nats)?;
        d.set_item("prior", c.prior)?;
        d.set_item("rate", c.rate)?;
        d.set_item("degenerate", c.degenerate)?;
        d.set_item("closed_form_prior", c.closed_form_prior)?;
        Ok(d)
    }

    #[pyo3(signature = (restarts=DEFAULT_RESTARTS, seed=DEFAULT_SEED))]
    fn coherent_information(&self, restarts: usize, seed: u64) -> PyResult<f64> {
        coherent_information_with(&self.inner, restarts, seed)
            .map(|c| c.value)
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("ChannelParams(pe={}, a={}, b={}, c={}, d={})", p.pe, p.a, p.b, p.c, p.d)
    }
}

#[pyfunction]
fn compute_params(py: Python<'_>, scenario: &PyScenario) -> PyResult<PyParams> {
    let s = scenario.inner.clone();
    let inner = py.detach(|| cp::compute_params(&s)).map_err(to_py)?;
    Ok(PyParams { inner })
}

#[pyfunction]
fn fermi_probability(py: Python<'_>, scenario: &PyScenario) -> PyResult<f64> {
    let s = scenario.inner.clone();
    py.detach(|| cp::fermi_probability(&s)).map(|e| e.value).map_err(to_py)
}

#[pyfunction]
fn glauber_leakage(py: Python<'_>, scenario: &PyScenario) -> PyResult<Complex64> {
    let s = scenario.inner.clone();
    py.detach(|| cp::glauber_leakage(&s)).map(|e| e.value).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (mass, dt, r, eps))]
fn wightman(mass: f64, dt: f64, r: f64, eps: f64) -> PyResult<Complex64> {
    rqchannel::correlators::wightman(mass, dt, r, eps).map_err(to_py)
}

/// `(R, S, T)` for Gaussian smearing of width `dx`.
#[pyfunction]
#[pyo3(signature = (gap, separation, dx, mass=0.0))]
fn vacuum_integrals(py: Python<'_>, gap: f64, separation: f64, dx: f64, mass: f64) -> PyResult<(f64, f64, f64)> {
    let v = py
        .detach(|| vacuum::vacuum_integrals(gap, separation, dx, mass))
        .map_err(to_py)?;
    Ok((v.r, v.s, v.t))
}

/// Negativity of the dressed ground state of two smeared detectors.
#[pyfunction]
#[pyo3(signature = (alpha, gap, separation, dx, mass=0.0))]
fn ground_state_negativity(py: Python<'_>, alpha: f64, gap: f64, separation: f64, dx: f64, mass: f64) -> PyResult<f64> {
    py.detach(|| {
        let v = vacuum::vacuum_integrals(gap, separation, dx, mass)?;
        let g = vacuum::ground_state_reduced(alpha, &v)?;
        Ok(vacuum::negativity(&g.matrix))
    })
    .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (gap, dx, mass=0.0))]
fn entanglement_threshold(gap: f64, dx: f64, mass: f64) -> PyResult<f64> {
    vacuum::entanglement_threshold(gap, dx, mass).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (mass, gap, alpha, box_size=None))]
fn adiabatic_bound(mass: f64, gap: f64, alpha: f64, box_size: Option<f64>) -> PyResult<f64> {
    vacuum::adiabatic_bound(mass, gap, alpha, box_size)
        .map(|b| b.bound)
        .map_err(to_py)
}

#[pyfunction]
fn speed_bound(gap: f64, alpha: f64) -> PyResult<f64> {
    vacuum::speed_bound(gap, alpha).map_err(to_py)
}

#[pyfunction]
fn casimir_energy(py: Python<'_>, gap: f64, separation: f64, alpha: f64) -> PyResult<f64> {
    py.detach(|| vacuum::casimir_energy(gap, separation, alpha, &vacuum::casimir_regulator(separation)))
        .map(|c| c.energy)
        .map_err(to_py)
}

#[pyfunction]
fn casimir_force(py: Python<'_>, gap: f64, separation: f64, alpha: f64) -> PyResult<f64> {
    py.detach(|| vacuum::casimir_force(gap, separation, alpha))
        .map_err(to_py)
}

/// Capacity scan over window lengths; returns the TSV table.
#[pyfunction]
#[pyo3(signature = (scenario, windows, jobs=1))]
fn capacity_scan_tsv(py: Python<'_>, scenario: &PyScenario, windows: Vec<f64>, jobs: usize) -> PyResult<String> {
    let s = scenario.inner.clone();
    py.detach(|| scan::capacity_scan(&s, &windows, jobs))
        .map(|r| r.to_tsv())
        .map_err(to_py)
}

#[pymodule]
fn rqchannel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PhysicsError", m.py().get_type::<PhysicsError>())?;
    m.add("ConvergenceError", m.py().get_type::<ConvergenceError>())?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyParams>()?;
    m.add_function(wrap_pyfunction!(compute_params, m)?)?;
    m.add_function(wrap_pyfunction!(fermi_probability, m)?)?;
    m.add_function(wrap_pyfunction!(glauber_leakage, m)?)?;
    m.add_function(wrap_pyfunction!(wightman, m)?)?;
    m.add_function(wrap_pyfunction!(vacuum_integrals, m)?)?;
    m.add_function(wrap_pyfunction!(ground_state_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(entanglement_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(adiabatic_bound, m)?)?;
    m.add_function(wrap_pyfunction!(speed_bound, m)?)?;
    m.add_function(wrap_pyfunction!(casimir_energy, m)?)?;
    m.add_function(wrap_pyfunction!(casimir_force, m)?)?;
    m.add_function(wrap_pyfunction!(capacity_scan_tsv, m)?)?;
    Ok(())
}
