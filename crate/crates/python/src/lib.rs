//! Python bindings: field configurations, spectra, energy scans, Chern and winding
//! numbers, and the command-line entry point.

use isingtop::phase::{scan_energy_with, DEFAULT_SAMPLES, DEFAULT_Z};
use isingtop::spectral::DEFAULT_NUM_K;
use isingtop::topology::DEFAULT_NPHI;
use isingtop::{Complex64, FieldKind};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(isingtop_py, IsingtopError, PyValueError);

fn err(e: isingtop::Error) -> PyErr {
    IsingtopError::new_err(format!("{}: {e}", e.name()))
}

#[pyclass(frozen, from_py_object, name = "FieldConfig")]
#[derive(Clone, Copy)]
struct PyFieldConfig(isingtop::FieldConfig);

#[pymethods]
impl PyFieldConfig {
    /// Staggered real fields `g1`, `g2`.
    #[staticmethod]
    fn real(g1: f64, g2: f64) -> PyResult<Self> {
        isingtop::FieldConfig::real(g1, g2).map(Self).map_err(err)
    }

    /// Conjugate pair `eta ∓ i·xi`.
    #[staticmethod]
    fn complex(eta: f64, xi: f64) -> PyResult<Self> {
        isingtop::FieldConfig::complex(eta, xi).map(Self).map_err(err)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.0.kind() {
            FieldKind::Real => "real",
            FieldKind::Complex => "complex",
        }
    }

    #[getter]
    fn params(&self) -> (f64, f64) {
        self.0.params()
    }

    #[getter]
    fn product(&self) -> f64 {
        self.0.product()
    }

    fn __repr__(&self) -> String {
        self.0.to_string()
    }
}

#[pyclass(frozen, get_all)]
struct ChernResult {
    raw: f64,
    snapped: f64,
    residual: f64,
    method: &'static str,
    boundary: bool,
}

impl From<isingtop::ChernResult> for ChernResult {
    fn from(r: isingtop::ChernResult) -> Self {
        Self {
            raw: r.raw,
            snapped: r.snapped.value(),
            residual: r.residual,
            method: match r.method {
                isingtop::ChernMethod::AnalyticWinding => "analytic_winding",
                isingtop::ChernMethod::CurvatureGrid => "curvature_grid",
            },
            boundary: r.boundary,
        }
    }
}

#[pymethods]
impl ChernResult {
    fn __repr__(&self) -> String {
        format!(
            "ChernResult(raw={}, snapped={}, method={})",
            self.raw, self.snapped, self.method
        )
    }
}

#[pyclass(frozen, get_all)]
struct LoopTrace {
    k: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    winding: f64,
    snapped: f64,
    boundary: bool,
    encloses_origin: bool,
}

/// Critical points are `(t, a, b)` with `t` the ray parameter in [0, 1].
#[pyclass(frozen, get_all)]
struct ScanResult {
    t: Vec<f64>,
    energies: Vec<f64>,
    second_derivative: Vec<f64>,
    excess: Vec<f64>,
    threshold: f64,
    criticals: Vec<(f64, f64, f64)>,
}

/// The four eigenvalues of the Bloch matrix in mode order (+,+), (+,−), (−,+), (−,−).
#[pyfunction]
fn spectrum(config: PyFieldConfig, k: f64) -> Vec<Complex64> {
    isingtop::spectral_factors(&config.0, k).values().to_vec()
}

#[pyfunction]
#[pyo3(signature = (config, num_k = DEFAULT_NUM_K))]
fn ground_energy_density(py: Python<'_>, config: PyFieldConfig, num_k: usize) -> PyResult<f64> {
    py.detach(|| isingtop::ground_energy_density(&config.0, num_k))
        .map_err(err)
}

/// `("I" | "II" | "Boundary", p)`.
#[pyfunction]
fn classify(config: PyFieldConfig) -> (String, f64) {
    let r = isingtop::classify(&config.0);
    (r.label.to_string(), r.p)
}

#[pyfunction]
#[pyo3(signature = (start, end, samples = DEFAULT_SAMPLES, num_k = DEFAULT_NUM_K, z = DEFAULT_Z))]
fn scan_energy(
    py: Python<'_>,
    start: PyFieldConfig,
    end: PyFieldConfig,
    samples: usize,
    num_k: usize,
    z: f64,
) -> PyResult<ScanResult> {
    let r = py
        .detach(|| scan_energy_with(&start.0, &end.0, samples, num_k, z))
        .map_err(err)?;
    Ok(ScanResult {
        t: (0..samples).map(|i| r.ray.t(i)).collect(),
        criticals: r
            .criticals
            .iter()
            .map(|c| {
                let (a, b) = c.config.params();
                (c.t, a, b)
            })
            .collect(),
        energies: r.energies,
        second_derivative: r.second_derivative,
        excess: r.excess,
        threshold: r.threshold,
    })
}

#[pyfunction]
#[pyo3(signature = (config, n_k = DEFAULT_NUM_K))]
fn chern_analytic(py: Python<'_>, config: PyFieldConfig, n_k: usize) -> PyResult<ChernResult> {
    py.detach(|| isingtop::chern_analytic(&config.0, n_k))
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (config, n_k = DEFAULT_NUM_K, n_phi = DEFAULT_NPHI))]
fn chern_curvature(
    py: Python<'_>,
    config: PyFieldConfig,
    n_k: usize,
    n_phi: usize,
) -> PyResult<ChernResult> {
    py.detach(|| isingtop::chern_curvature(&config.0, n_k, n_phi))
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (config, n_k = DEFAULT_NUM_K))]
fn loop_trace(config: PyFieldConfig, n_k: usize) -> PyResult<LoopTrace> {
    let t = isingtop::loop_trace(&config.0, n_k).map_err(err)?;
    Ok(LoopTrace {
        k: t.samples.iter().map(|s| s.k).collect(),
        x: t.samples.iter().map(|s| s.x).collect(),
        y: t.samples.iter().map(|s| s.y).collect(),
        winding: t.winding,
        snapped: t.snapped().value(),
        boundary: t.boundary,
        encloses_origin: t.encloses_origin,
    })
}

/// Runs the command-line tool in process: `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    py.detach(|| {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("isingtop".to_string()).chain(args);
        let code = isingtop::cli::run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8_lossy(&out).into_owned(),
            String::from_utf8_lossy(&err).into_owned(),
        )
    })
}

#[pymodule]
fn isingtop_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("IsingtopError", m.py().get_type::<IsingtopError>())?;
    m.add_class::<PyFieldConfig>()?;
    m.add_class::<ChernResult>()?;
    m.add_class::<LoopTrace>()?;
    m.add_class::<ScanResult>()?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(ground_energy_density, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(scan_energy, m)?)?;
    m.add_function(wrap_pyfunction!(chern_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(chern_curvature, m)?)?;
    m.add_function(wrap_pyfunction!(loop_trace, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
