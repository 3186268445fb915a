//! Python bindings: networks, duration models, empirical hazards and
//! scenario runs driven by the same JSON configs as the command-line tool.

use std::path::PathBuf;

use pyo3::exceptions::{PyIndexError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use stergm_core::duration::{self, MixtureModel, PiecewiseModel};
use stergm_core::hazard::{self, HazardTable};
use stergm_core::scenario::{self, DurationModelConfig, ScenarioConfig};
use stergm_core::{Error, Network, Spell};

/// `(age, n_terminated_at, n_terminated_ge, hazard)`.
type HazardRowTuple = (u64, u64, u64, Option<f64>);
/// `(tail, head, onset, terminus, censored)`.
type SpellTuple = (u32, u32, u64, Option<u64>, bool);

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        e if e.is_config_error() => PyValueError::new_err(e.to_string()),
        Error::OutputSchema { .. } | Error::Containment(_) => PyRuntimeError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

/// Undirected simple graph on actors `0..n`.
#[pyclass(name = "Network", module = "stergm", skip_from_py_object)]
#[derive(Clone)]
struct PyNetwork {
    inner: Network,
}

impl PyNetwork {
    fn check_actor(&self, actor: u32) -> PyResult<()> {
        if (actor as usize) < self.inner.n() {
            Ok(())
        } else {
            Err(PyIndexError::new_err(format!(
                "actor {actor} out of range for n = {}",
                self.inner.n()
            )))
        }
    }
}

#[pymethods]
impl PyNetwork {
    #[new]
    #[pyo3(signature = (n, edges = Vec::new()))]
    fn new(n: usize, edges: Vec<(u32, u32)>) -> PyResult<Self> {
        Network::from_edges(n, edges)
            .map(|inner| PyNetwork { inner })
            .map_err(to_py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn dyad_count(&self) -> usize {
        self.inner.dyad_count()
    }

    fn density(&self) -> f64 {
        self.inner.density()
    }

    fn degree(&self, actor: u32) -> PyResult<u32> {
        self.check_actor(actor)?;
        Ok(self.inner.degree(actor))
    }

    fn degree1_count(&self) -> usize {
        self.inner.degree1_count()
    }

    fn has_edge(&self, a: u32, b: u32) -> PyResult<bool> {
        let d = self.inner.dyad(a, b).map_err(to_py_err)?;
        Ok(self.inner.has_edge(d))
    }

    /// Adds the tie; returns whether it was absent before.
    fn add_edge(&mut self, a: u32, b: u32) -> PyResult<bool> {
        let d = self.inner.dyad(a, b).map_err(to_py_err)?;
        Ok(self.inner.add_edge(d))
    }

    /// Removes the tie; returns whether it was present before.
    fn remove_edge(&mut self, a: u32, b: u32) -> PyResult<bool> {
        let d = self.inner.dyad(a, b).map_err(to_py_err)?;
        Ok(self.inner.remove_edge(d))
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner.edges().map(|d| (d.lo(), d.hi())).collect()
    }

    fn copy(&self) -> Self {
        self.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.edge_count()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Network(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

/// Applies one step: the dissolution result plus the ties newly formed.
#[pyfunction]
fn combine(y_prev: &PyNetwork, y_plus: &PyNetwork, y_minus: &PyNetwork) -> PyResult<PyNetwork> {
    stergm_core::combine(&y_prev.inner, &y_plus.inner, &y_minus.inner)
        .map(|inner| PyNetwork { inner })
        .map_err(to_py_err)
}

/// Piecewise-constant dissolution hazard: one level while the age is in
/// `ages`, a baseline level otherwise.
#[pyclass(name = "PiecewiseModel", module = "stergm", frozen)]
struct PyPiecewiseModel {
    inner: PiecewiseModel,
}

#[pymethods]
impl PyPiecewiseModel {
    #[new]
    fn new(theta1: f64, theta2: f64, ages: Vec<u64>) -> PyResult<Self> {
        PiecewiseModel::new(theta1, theta2, ages.into_iter().collect())
            .map(|inner| PyPiecewiseModel { inner })
            .map_err(to_py_err)
    }

    #[staticmethod]
    fn from_hazards(baseline_hazard: f64, in_set_hazard: f64, ages: Vec<u64>) -> PyResult<Self> {
        PiecewiseModel::from_hazards(baseline_hazard, in_set_hazard, ages.into_iter().collect())
            .map(|inner| PyPiecewiseModel { inner })
            .map_err(to_py_err)
    }

    #[getter]
    fn theta1(&self) -> f64 {
        self.inner.theta1()
    }

    #[getter]
    fn theta2(&self) -> f64 {
        self.inner.theta2()
    }

    #[getter]
    fn a0(&self) -> u64 {
        self.inner.a0()
    }

    #[getter]
    fn baseline_hazard(&self) -> f64 {
        self.inner.baseline_hazard()
    }

    #[getter]
    fn in_set_hazard(&self) -> f64 {
        self.inner.in_set_hazard()
    }

    fn hazard(&self, x: u64) -> PyResult<f64> {
        self.inner.hazard(x).map_err(to_py_err)
    }

    fn pmf(&self, x: u64) -> PyResult<f64> {
        self.inner.pmf(x).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "PiecewiseModel(theta1={}, theta2={}, ages={:?})",
            self.inner.theta1(),
            self.inner.theta2(),
            self.inner.ages()
        )
    }
}

/// Finite mixture of geometric tie durations.
#[pyclass(name = "MixtureModel", module = "stergm", frozen)]
struct PyMixtureModel {
    inner: MixtureModel,
}

#[pymethods]
impl PyMixtureModel {
    #[new]
    fn new(omega: Vec<f64>, pi: Vec<f64>) -> PyResult<Self> {
        MixtureModel::new(omega, pi)
            .map(|inner| PyMixtureModel { inner })
            .map_err(to_py_err)
    }

    #[getter]
    fn omega(&self) -> Vec<f64> {
        self.inner.omega().to_vec()
    }

    #[getter]
    fn pi(&self) -> Vec<f64> {
        self.inner.pi().to_vec()
    }

    fn pmf(&self, x: u64) -> f64 {
        self.inner.pmf(x)
    }

    fn cdf(&self, x: u64) -> f64 {
        self.inner.cdf(x)
    }

    fn survival(&self, x: u64) -> f64 {
        self.inner.survival(x)
    }

    fn hazard(&self, x: u64) -> f64 {
        self.inner.hazard(x)
    }

    fn initial_hazard(&self) -> f64 {
        self.inner.initial_hazard()
    }

    fn limiting_hazard(&self) -> f64 {
        self.inner.limiting_hazard()
    }

    fn __repr__(&self) -> String {
        format!(
            "MixtureModel(omega={:?}, pi={:?})",
            self.inner.omega(),
            self.inner.pi()
        )
    }
}

/// Canonical `age_buckets(a0)` dissolution parameters reproducing the mixture hazard.
#[pyfunction]
fn curved_eta(model: &PyMixtureModel, a0: u64) -> PyResult<Vec<f64>> {
    duration::curved_eta(&model.inner, a0).map_err(to_py_err)
}

/// Smallest age at which the mixture hazard is within `eps` of its limit.
#[pyfunction]
fn choose_cutoff(model: &PyMixtureModel, eps: f64) -> PyResult<u64> {
    duration::choose_cutoff(&model.inner, eps).map_err(to_py_err)
}

/// Least-squares `linear_age(a0)` approximation of the mixture hazard.
#[pyfunction]
fn fit_linear_age<'py>(py: Python<'py>, model: &PyMixtureModel, a0: u64) -> PyResult<Bound<'py, PyDict>> {
    let fit = duration::fit_linear_age(&model.inner, a0).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("theta1", fit.theta1)?;
    out.set_item("theta2", fit.theta2)?;
    out.set_item("rms_error", fit.rms_error)?;
    out.set_item("max_hazard_error", fit.max_hazard_error)?;
    Ok(out)
}

/// Duration pmf for ages `1..=len(hazards)` and the mass beyond.
#[pyfunction]
fn pmf_from_hazard(hazards: Vec<f64>) -> PyResult<(Vec<f64>, f64)> {
    if let Some(h) = hazards.iter().find(|h| !(0.0..=1.0).contains(*h)) {
        return Err(PyValueError::new_err(format!("hazard {h} outside [0, 1]")));
    }
    let table = duration::pmf_from_hazard(|x| hazards[x as usize - 1], hazards.len() as u64);
    Ok((table.pmf, table.tail_mass))
}

/// `(x, f, F, h)` rows for a duration model given as JSON.
#[pyfunction]
fn duration_curve(model_json: &str, x_max: u64) -> PyResult<Vec<(u64, f64, f64, f64)>> {
    let model = DurationModelConfig::from_json(model_json)
        .and_then(|c| c.build())
        .map_err(to_py_err)?;
    let points = model.curve(x_max).map_err(to_py_err)?;
    Ok(points.into_iter().map(|p| (p.x, p.f, p.cdf, p.h)).collect())
}

fn hazard_rows(table: &HazardTable) -> Vec<HazardRowTuple> {
    table
        .rows
        .iter()
        .map(|r| (r.age, r.n_terminated_at, r.n_terminated_ge, r.hazard))
        .collect()
}

/// Empirical hazard from `(onset, terminus or None, censored)` spells.
/// Returns `(age, n_terminated_at, n_terminated_ge, hazard or None)` rows.
#[pyfunction]
#[pyo3(signature = (spells, burn_in = 0, x_max = 15))]
fn empirical_hazard(
    spells: Vec<(u64, Option<u64>, bool)>,
    burn_in: u64,
    x_max: u64,
) -> PyResult<Vec<HazardRowTuple>> {
    let mut log = Vec::with_capacity(spells.len());
    for (i, (onset, terminus, censored)) in spells.into_iter().enumerate() {
        if terminus.is_some_and(|t| t <= onset) {
            return Err(PyValueError::new_err(format!("spell {i} ends before it starts")));
        }
        log.push(Spell {
            tail: 0,
            head: 1,
            onset,
            terminus,
            censored,
        });
    }
    let table = hazard::empirical_hazard(log.iter(), burn_in, x_max).map_err(to_py_err)?;
    Ok(hazard_rows(&table))
}

fn parse_config(config_json: &str) -> PyResult<ScenarioConfig> {
    ScenarioConfig::from_json(config_json).map_err(to_py_err)
}

/// Checks a scenario config; raises `ValueError` with a line-numbered message.
#[pyfunction]
fn validate_config(config_json: &str) -> PyResult<()> {
    parse_config(config_json).map(|_| ())
}

/// Runs a scenario config in memory. Returns a dict with the pooled hazard
/// rows, equilibrium means and each replicate's spells as
/// `(tail, head, onset, terminus or None, censored)` with 0-based actors.
#[pyfunction]
fn simulate<'py>(py: Python<'py>, config_json: &str) -> PyResult<Bound<'py, PyDict>> {
    let config = parse_config(config_json)?;
    let result = py
        .detach(|| scenario::execute_scenario(&config))
        .map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("density", result.equilibrium.density_mean)?;
    out.set_item("prop_degree1", result.equilibrium.prop_degree1_mean)?;
    out.set_item("n_steps_used", result.equilibrium.n_steps_used)?;
    out.set_item("n_eligible_spells", result.hazard.n_spells)?;
    out.set_item("hazard", hazard_rows(&result.hazard))?;
    let spells: Vec<Vec<SpellTuple>> = result
        .replicates
        .iter()
        .map(|r| {
            r.spells
                .iter()
                .map(|s| (s.tail, s.head, s.onset, s.terminus, s.censored))
                .collect()
        })
        .collect();
    out.set_item("spells", spells)?;
    out.set_item(
        "replicate_seeds",
        result.replicates.iter().map(|r| r.seed).collect::<Vec<_>>(),
    )?;
    Ok(out)
}

/// Runs a scenario config and writes its output files; returns the manifest hash.
#[pyfunction]
fn run_scenario(py: Python<'_>, config_json: &str, out_dir: PathBuf) -> PyResult<String> {
    let config = parse_config(config_json)?;
    py.detach(|| scenario::run_scenario(&config, &out_dir))
        .map(|(_, written)| written.manifest_sha256)
        .map_err(to_py_err)
}

#[pymodule]
pub fn stergm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyNetwork>()?;
    m.add_class::<PyPiecewiseModel>()?;
    m.add_class::<PyMixtureModel>()?;
    m.add_function(wrap_pyfunction!(combine, m)?)?;
    m.add_function(wrap_pyfunction!(curved_eta, m)?)?;
    m.add_function(wrap_pyfunction!(choose_cutoff, m)?)?;
    m.add_function(wrap_pyfunction!(fit_linear_age, m)?)?;
    m.add_function(wrap_pyfunction!(pmf_from_hazard, m)?)?;
    m.add_function(wrap_pyfunction!(duration_curve, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_hazard, m)?)?;
    m.add_function(wrap_pyfunction!(validate_config, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
