//! Python bindings: catalog problems, envelope evaluation, the descent
//! iteration and the check suites.

use hifbe::analysis::{run_suite, Suite};
use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: hifbe::Error) -> PyErr {
    use hifbe::Error::*;
    match e {
        CatalogMiss { .. } => PyKeyError::new_err(e.to_string()),
        InvalidConfig(_) | DimensionMismatch { .. } | GammaTooLarge { .. } => PyValueError::new_err(e.to_string()),
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Accepts a float or a sequence of floats.
fn point(x: &Bound<'_, PyAny>) -> PyResult<Vec<f64>> {
    if let Ok(v) = x.extract::<f64>() {
        return Ok(vec![v]);
    }
    x.extract::<Vec<f64>>()
}

/// A catalog problem `phi = f + g`.
#[pyclass(name = "Problem", module = "pyhifbe", frozen)]
pub struct Problem {
    inner: hifbe::CompositeProblem,
}

#[pymethods]
impl Problem {
    #[new]
    fn new(id: &str) -> PyResult<Self> {
        Ok(Problem {
            inner: hifbe::problem_catalog_get(id).map_err(to_py)?,
        })
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn nu(&self) -> f64 {
        self.inner.f.nu
    }

    #[getter]
    fn l_nu(&self) -> f64 {
        self.inner.f.l_nu
    }

    #[getter]
    fn known_minimizer(&self) -> Option<(Vec<f64>, f64)> {
        self.inner.known_minimizer.clone()
    }

    /// `phi(x)`; `inf` outside the domain of `g`.
    fn value(&self, x: &Bound<'_, PyAny>) -> PyResult<f64> {
        Ok(self.inner.value(&point(x)?).map_err(to_py)?.to_f64())
    }

    fn grad_f(&self, x: &Bound<'_, PyAny>) -> PyResult<Vec<f64>> {
        self.inner.f.grad(&point(x)?).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Problem('{}')", self.inner.id)
    }
}

/// Order, parameter and inner-solver settings.
#[pyclass(name = "Config", module = "pyhifbe")]
#[derive(Clone)]
pub struct Config {
    inner: hifbe::EnvelopeConfig,
}

#[pymethods]
impl Config {
    #[new]
    #[pyo3(signature = (p = 2.0, gamma = 1.0, grid_points = 4001, tol_y = 1e-8, tol_val = 1e-10, use_analytic = true))]
    fn new(p: f64, gamma: f64, grid_points: usize, tol_y: f64, tol_val: f64, use_analytic: bool) -> PyResult<Self> {
        let inner = hifbe::EnvelopeConfig {
            grid_points,
            tol_y,
            tol_val,
            use_analytic,
            ..hifbe::EnvelopeConfig::new(p, gamma)
        };
        inner.validate().map_err(to_py)?;
        Ok(Config { inner })
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn grid_points(&self) -> usize {
        self.inner.grid_points
    }

    #[getter]
    fn use_analytic(&self) -> bool {
        self.inner.use_analytic
    }

    fn __repr__(&self) -> String {
        format!("Config(p={}, gamma={})", self.inner.p, self.inner.gamma)
    }
}

/// Envelope value and splitting set at one point.
#[pyclass(name = "EnvelopeEval", module = "pyhifbe", frozen, get_all)]
pub struct EnvelopeEval {
    value: f64,
    minimizers: Vec<Vec<f64>>,
    representative: Vec<f64>,
    residual: Vec<f64>,
    single_valued: bool,
    certified: bool,
}

#[pymethods]
impl EnvelopeEval {
    fn __repr__(&self) -> String {
        format!("EnvelopeEval(value={}, representative={:?})", self.value, self.representative)
    }
}

/// Iterates of a descent run.
#[pyclass(name = "Trace", module = "pyhifbe", frozen)]
pub struct Trace {
    inner: hifbe::HifbaTrace,
}

#[pymethods]
impl Trace {
    #[getter]
    fn stop_reason(&self) -> String {
        self.inner.stop_reason.to_string()
    }

    #[getter]
    fn final_residual(&self) -> f64 {
        self.inner.final_residual()
    }

    #[getter]
    fn diagnostics(&self) -> Vec<String> {
        self.inner.diagnostics.clone()
    }

    #[getter]
    fn x(&self) -> Vec<Vec<f64>> {
        self.inner.records.iter().map(|r| r.x.clone()).collect()
    }

    #[getter]
    fn phi(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.phi).collect()
    }

    #[getter]
    fn env(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.env).collect()
    }

    #[getter]
    fn res_norm(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.res_norm).collect()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn __len__(&self) -> usize {
        self.inner.records.len()
    }
}

#[pyfunction]
fn catalog_ids() -> Vec<&'static str> {
    hifbe::CATALOG_IDS.to_vec()
}

#[pyfunction]
#[pyo3(name = "hifbe")]
fn envelope(problem: &Problem, x: &Bound<'_, PyAny>, config: &Config) -> PyResult<EnvelopeEval> {
    let ev = hifbe::hifbe(&problem.inner, &point(x)?, &config.inner).map_err(to_py)?;
    Ok(EnvelopeEval {
        value: ev.value,
        minimizers: ev.hifbs.minimizers,
        representative: ev.hifbs.representative,
        residual: ev.residual,
        single_valued: ev.single_valued,
        certified: ev.certified,
    })
}

#[pyfunction]
fn hifbs(problem: &Problem, x: &Bound<'_, PyAny>, config: &Config) -> PyResult<Vec<Vec<f64>>> {
    Ok(hifbe::hifbs(&problem.inner, &point(x)?, &config.inner).map_err(to_py)?.minimizers)
}

#[pyfunction]
fn residual(problem: &Problem, x: &Bound<'_, PyAny>, config: &Config) -> PyResult<Vec<f64>> {
    hifbe::residual(&problem.inner, &point(x)?, &config.inner).map_err(to_py)
}

#[pyfunction]
fn candidate_gradient<'py>(py: Python<'py>, problem: &Problem, x: &Bound<'py, PyAny>, config: &Config) -> PyResult<Bound<'py, PyDict>> {
    let g = hifbe::candidate_gradient(&problem.inner, &point(x)?, &config.inner).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("v", g.v)?;
    d.set_item("y", g.y)?;
    d.set_item("single_valued", g.single_valued)?;
    d.set_item("at_kink", g.at_kink)?;
    d.set_item("certified", g.certified)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (problem, x, config, h = None))]
fn fd_gradient(problem: &Problem, x: &Bound<'_, PyAny>, config: &Config, h: Option<f64>) -> PyResult<Vec<f64>> {
    hifbe::fd_gradient(&problem.inner, &point(x)?, &config.inner, h).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (problem, x0, config, max_iters = 500, res_tol = 1e-6))]
fn hifba_run(problem: &Problem, x0: &Bound<'_, PyAny>, config: &Config, max_iters: usize, res_tol: f64) -> PyResult<Trace> {
    Ok(Trace {
        inner: hifbe::hifba_run(&problem.inner, &point(x0)?, &config.inner, max_iters, res_tol).map_err(to_py)?,
    })
}

#[pyfunction]
#[pyo3(signature = (p, r, dim = 1, n_samples = 10_000, seed = 0))]
fn estimate_kappa_p(p: f64, r: f64, dim: usize, n_samples: usize, seed: u64) -> PyResult<f64> {
    hifbe::analysis::estimate_kappa_p(p, r, dim, n_samples, seed).map_err(to_py)
}

/// Runs a check suite; returns the reports as a JSON array string.
#[pyfunction]
#[pyo3(signature = (suite = "all", problem = None, seed = 0))]
fn check_json(suite: &str, problem: Option<&str>, seed: u64) -> PyResult<String> {
    let suite: Suite = suite.parse().map_err(to_py)?;
    let reports = run_suite(suite, problem, seed).map_err(to_py)?;
    serde_json::to_string(&reports).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn pyhifbe(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<Config>()?;
    m.add_class::<EnvelopeEval>()?;
    m.add_class::<Trace>()?;
    m.add_function(wrap_pyfunction!(catalog_ids, m)?)?;
    m.add_function(wrap_pyfunction!(envelope, m)?)?;
    m.add_function(wrap_pyfunction!(hifbs, m)?)?;
    m.add_function(wrap_pyfunction!(residual, m)?)?;
    m.add_function(wrap_pyfunction!(candidate_gradient, m)?)?;
    m.add_function(wrap_pyfunction!(fd_gradient, m)?)?;
    m.add_function(wrap_pyfunction!(hifba_run, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_kappa_p, m)?)?;
    m.add_function(wrap_pyfunction!(check_json, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
