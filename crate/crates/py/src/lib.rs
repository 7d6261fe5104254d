//! Python bindings for the race model.
//!
//! Parameters are plain classes with keyword constructors; results come
//! back as Python lists and dicts.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use dsair::abm::{abm_run, AbmConfig};
use dsair::analysis::{self, transition_graph};
use dsair::config::parse_config;
use dsair::evolution::{self, unsafe_frequency};
use dsair::payoff::build_payoff_matrix;
use dsair::sweep::run_sweep_with_workers;

create_exception!(pydsair, ModelError, PyValueError);

fn to_py(err: dsair::Error) -> PyErr {
    ModelError::new_err(err.to_string())
}

#[pyclass(name = "RaceParams", skip_from_py_object)]
#[derive(Clone)]
pub struct PyRaceParams {
    inner: dsair::RaceParams,
}

#[pymethods]
impl PyRaceParams {
    #[new]
    #[pyo3(signature = (*, b=4.0, c=1.0, s=1.5, prize=1.0e4, rounds=100, p_r=0.5, epsilon=0.0, s_alpha=0.3, s_beta=1.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        b: f64,
        c: f64,
        s: f64,
        prize: f64,
        rounds: u32,
        p_r: f64,
        epsilon: f64,
        s_alpha: f64,
        s_beta: f64,
    ) -> PyResult<Self> {
        let inner = dsair::RaceParams {
            benefit: b,
            safety_cost: c,
            unsafe_speed: s,
            prize,
            rounds,
            disaster_risk: p_r,
            commitment_cost: epsilon,
            sanction_cost: s_alpha,
            sanction_effect: s_beta,
        };
        inner.validate().map_err(to_py)?;
        Ok(PyRaceParams { inner })
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.benefit
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.safety_cost
    }

    #[getter]
    fn s(&self) -> f64 {
        self.inner.unsafe_speed
    }

    #[getter]
    fn prize(&self) -> f64 {
        self.inner.prize
    }

    #[getter]
    fn rounds(&self) -> u32 {
        self.inner.rounds
    }

    #[getter]
    fn p_r(&self) -> f64 {
        self.inner.disaster_risk
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.commitment_cost
    }

    #[getter]
    fn s_alpha(&self) -> f64 {
        self.inner.sanction_cost
    }

    #[getter]
    fn s_beta(&self) -> f64 {
        self.inner.sanction_effect
    }

    /// Copy with `p_r` replaced.
    fn with_risk(&self, p_r: f64) -> PyResult<Self> {
        let inner = dsair::RaceParams {
            disaster_risk: p_r,
            ..self.inner
        };
        inner.validate().map_err(to_py)?;
        Ok(PyRaceParams { inner })
    }

    fn __repr__(&self) -> String {
        let r = &self.inner;
        format!(
            "RaceParams(b={:?}, c={:?}, s={:?}, prize={:?}, rounds={}, p_r={:?}, epsilon={:?}, s_alpha={:?}, s_beta={:?})",
            r.benefit,
            r.safety_cost,
            r.unsafe_speed,
            r.prize,
            r.rounds,
            r.disaster_risk,
            r.commitment_cost,
            r.sanction_cost,
            r.sanction_effect
        )
    }
}

#[pyclass(name = "EvoParams", skip_from_py_object)]
#[derive(Clone)]
pub struct PyEvoParams {
    inner: dsair::EvoParams,
}

#[pymethods]
impl PyEvoParams {
    #[new]
    #[pyo3(signature = (*, population=100, selection=1.0))]
    fn new(population: u32, selection: f64) -> PyResult<Self> {
        let inner = dsair::EvoParams::new(population, selection).map_err(to_py)?;
        Ok(PyEvoParams { inner })
    }

    #[getter]
    fn population(&self) -> u32 {
        self.inner.population
    }

    #[getter]
    fn selection(&self) -> f64 {
        self.inner.selection
    }

    fn __repr__(&self) -> String {
        format!(
            "EvoParams(population={}, selection={:?})",
            self.inner.population, self.inner.selection
        )
    }
}

#[pyclass(name = "Scenario", skip_from_py_object)]
#[derive(Clone)]
pub struct PyScenario {
    inner: dsair::Scenario,
}

#[pymethods]
impl PyScenario {
    /// `regime` is "none", "peer" or "institutional".
    #[new]
    #[pyo3(signature = (regime="none", commitments=false, fallback_safe=false))]
    fn new(regime: &str, commitments: bool, fallback_safe: bool) -> PyResult<Self> {
        let regime: dsair::Regime = regime.parse().map_err(to_py)?;
        let inner = dsair::make_scenario(regime, commitments, fallback_safe).map_err(to_py)?;
        Ok(PyScenario { inner })
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.names().iter().map(|s| s.to_string()).collect()
    }

    #[getter]
    fn regime(&self) -> String {
        self.inner.regime.to_string()
    }

    #[getter]
    fn commitments(&self) -> bool {
        self.inner.commitments_enabled
    }

    #[getter]
    fn slug(&self) -> String {
        self.inner.slug()
    }

    /// Whether each strategy plays UNSAFE against itself.
    fn unsafe_mask(&self) -> Vec<bool> {
        self.inner.unsafe_mask()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario({:?}, labels={:?})",
            self.inner.slug(),
            self.inner.names()
        )
    }
}

/// Averaged per-round payoff matrix, row player first.
#[pyfunction]
fn payoff_matrix(scenario: &PyScenario, race: &PyRaceParams) -> PyResult<Vec<Vec<f64>>> {
    let matrix = build_payoff_matrix(&scenario.inner, &race.inner).map_err(to_py)?;
    Ok(matrix.rows())
}

/// Fixation probability of one A mutant among B residents.
#[pyfunction]
#[pyo3(signature = (pi_aa, pi_ab, pi_ba, pi_bb, evo=None))]
fn fixation_probability(
    pi_aa: f64,
    pi_ab: f64,
    pi_ba: f64,
    pi_bb: f64,
    evo: Option<&PyEvoParams>,
) -> f64 {
    let evo = evo.map(|e| e.inner).unwrap_or_default();
    evolution::fixation_2x2(pi_aa, pi_ab, pi_ba, pi_bb, &evo)
}

/// Fixation matrix, transition matrix and stationary distribution.
#[pyfunction]
#[pyo3(signature = (scenario, race, evo=None))]
fn analyse<'py>(
    py: Python<'py>,
    scenario: &PyScenario,
    race: &PyRaceParams,
    evo: Option<&PyEvoParams>,
) -> PyResult<Bound<'py, PyDict>> {
    let evo = evo.map(|e| e.inner).unwrap_or_default();
    let matrix = build_payoff_matrix(&scenario.inner, &race.inner).map_err(to_py)?;
    let result = py
        .detach(|| evolution::analyse(&matrix, &evo))
        .map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("labels", result.labels.clone())?;
    out.set_item("payoffs", matrix.rows())?;
    out.set_item("fixation", result.fixation.clone())?;
    out.set_item("transition", result.markov.rows())?;
    out.set_item("stationary", result.stationary.clone())?;
    out.set_item(
        "unsafe_frequency",
        unsafe_frequency(&result.stationary, &scenario.inner),
    )?;
    Ok(out)
}

/// Dominant transitions as Graphviz DOT text.
#[pyfunction]
#[pyo3(signature = (scenario, race, evo=None, tolerance=analysis::DEFAULT_NEUTRAL_TOLERANCE))]
fn transitions_dot(
    scenario: &PyScenario,
    race: &PyRaceParams,
    evo: Option<&PyEvoParams>,
    tolerance: f64,
) -> PyResult<String> {
    let evo = evo.map(|e| e.inner).unwrap_or_default();
    let matrix = build_payoff_matrix(&scenario.inner, &race.inner).map_err(to_py)?;
    let result = evolution::analyse(&matrix, &evo).map_err(to_py)?;
    let graph = transition_graph(&result, evo.population, tolerance);
    Ok(graph.to_dot(&scenario.inner.slug()))
}

#[pyfunction]
fn zone_boundaries(s: f64) -> PyResult<(f64, f64)> {
    analysis::zone_boundaries(s).map_err(to_py)
}

/// "I", "II" or "III".
#[pyfunction]
fn classify_zone(s: f64, p_r: f64) -> PyResult<String> {
    analysis::classify_zone(s, p_r)
        .map(|z| z.to_string())
        .map_err(to_py)
}

#[pyfunction]
fn risk_dominant(scenario: &PyScenario, race: &PyRaceParams, a: &str, b: &str) -> PyResult<bool> {
    let index = |name: &str| {
        scenario
            .inner
            .index_of(name)
            .ok_or_else(|| ModelError::new_err(format!("unknown strategy {name}")))
    };
    let (a, b) = (index(a)?, index(b)?);
    let matrix = build_payoff_matrix(&scenario.inner, &race.inner).map_err(to_py)?;
    Ok(analysis::risk_dominant(a, b, &matrix))
}

/// Runs a sweep described by configuration text. Returns one dict per
/// scenario with `labels`, `axes` and a `points` list.
#[pyfunction]
#[pyo3(signature = (config_text, workers=0))]
fn sweep<'py>(
    py: Python<'py>,
    config_text: &str,
    workers: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let config = parse_config(config_text).map_err(to_py)?;
    let spec = config.sweep_spec().map_err(to_py)?;
    let workers = if workers == 0 {
        config.workers
    } else {
        workers
    };
    let result = py
        .detach(|| match workers {
            0 => dsair::sweep::run_sweep(&spec),
            n => run_sweep_with_workers(&spec, n),
        })
        .map_err(to_py)?;
    let axes: Vec<&str> = spec.axes.iter().map(|a| a.param.key()).collect();
    let mut blocks = Vec::with_capacity(result.blocks.len());
    for block in &result.blocks {
        let out = PyDict::new(py);
        out.set_item("scenario", &block.scenario)?;
        out.set_item("labels", block.labels.clone())?;
        out.set_item("axes", axes.clone())?;
        let mut points = Vec::with_capacity(block.points.len());
        for point in &block.points {
            let p = PyDict::new(py);
            p.set_item("coordinates", point.coordinates.clone())?;
            p.set_item("stationary", point.stationary.clone())?;
            p.set_item("unsafe_frequency", point.unsafe_frequency)?;
            p.set_item("zone", point.zone.map(|z| z.to_string()))?;
            p.set_item("error", point.error.clone())?;
            points.push(p);
        }
        out.set_item("points", points)?;
        blocks.push(out);
    }
    Ok(blocks)
}

/// Agent-based simulation. Returns `labels`, time-averaged `frequencies`
/// and the `trace` as (event, frequencies) pairs.
#[pyfunction]
#[pyo3(signature = (scenario, race, evo=None, *, mu=1e-3, steps=1_000_000, burn_in=10_000, seed=1, trace_points=0))]
#[allow(clippy::too_many_arguments)]
fn abm<'py>(
    py: Python<'py>,
    scenario: &PyScenario,
    race: &PyRaceParams,
    evo: Option<&PyEvoParams>,
    mu: f64,
    steps: u64,
    burn_in: u64,
    seed: u64,
    trace_points: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let config = AbmConfig {
        scenario: scenario.inner.clone(),
        race: race.inner,
        evo: evo.map(|e| e.inner).unwrap_or_default(),
        mutation: mu,
        steps,
        burn_in,
        seed,
        trace_points,
    };
    let result = py.detach(|| abm_run(&config)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("labels", result.labels)?;
    out.set_item("frequencies", result.frequencies)?;
    let trace: Vec<(u64, Vec<f64>)> = result
        .trace
        .into_iter()
        .map(|t| (t.event, t.frequencies))
        .collect();
    out.set_item("trace", trace)?;
    Ok(out)
}

#[pymodule]
pub fn pydsair(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ModelError", m.py().get_type::<ModelError>())?;
    m.add_class::<PyRaceParams>()?;
    m.add_class::<PyEvoParams>()?;
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(payoff_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(fixation_probability, m)?)?;
    m.add_function(wrap_pyfunction!(analyse, m)?)?;
    m.add_function(wrap_pyfunction!(transitions_dot, m)?)?;
    m.add_function(wrap_pyfunction!(zone_boundaries, m)?)?;
    m.add_function(wrap_pyfunction!(classify_zone, m)?)?;
    m.add_function(wrap_pyfunction!(risk_dominant, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(abm, m)?)?;
    Ok(())
}
