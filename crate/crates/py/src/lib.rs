use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use rumor_core::graph as core_graph;
use rumor_core::harness::{self, ExperimentConfig};
use rumor_core::{oracle, theory, Error, Family, FamilySpec, Protocol, ProtocolConfig};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::InvalidSpec(_)
        | Error::OutOfRange(_)
        | Error::Unsupported(_)
        | Error::VertexOutOfRange { .. }
        | Error::InvalidVertexSet(_)
        | Error::InvalidGraph(_) => PyValueError::new_err(err.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn protocol(name: &str) -> PyResult<Protocol> {
    name.parse().map_err(to_py)
}

#[pyclass(module = "rumor", frozen)]
struct Graph {
    inner: rumor_core::Graph,
}

#[pymethods]
impl Graph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = rumor_core::Graph::from_edges(n, edges).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (family, n, seed=0, p=None, d=None, eps=None))]
    fn generate(family: &str, n: usize, seed: u64, p: Option<f64>, d: Option<usize>, eps: Option<f64>) -> PyResult<Self> {
        let family = Family::from_parts(family, p, d, eps).map_err(to_py)?;
        let spec = FamilySpec::new(family, n).map_err(to_py)?;
        let inner = core_graph::generate(&spec, seed).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: rumor_core::Graph::from_json(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json(None).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn degree(&self, v: usize) -> PyResult<usize> {
        if v >= self.inner.n() {
            return Err(PyValueError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.degree(v))
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<u32>> {
        if v >= self.inner.n() {
            return Err(PyValueError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn is_connected(&self) -> bool {
        core_graph::is_connected(&self.inner)
    }

    fn edge_boundary(&self, vertices: Vec<usize>) -> PyResult<u64> {
        core_graph::edge_boundary(&self.inner, &vertices).map_err(to_py)
    }

    fn mixing_deviation(&self, vertices: Vec<usize>) -> PyResult<f64> {
        core_graph::mixing_deviation(&self.inner, &vertices).map_err(to_py)
    }

    /// `(min_degree, max_degree, lambda, method)`.
    fn spectral_profile(&self) -> (usize, usize, f64, String) {
        let p = core_graph::spectral_profile(&self.inner);
        let method = match p.method {
            core_graph::SpectralMethod::ExactEigensolve => "exact-eigensolve",
            core_graph::SpectralMethod::PowerIterationEstimate => "power-iteration-estimate",
        };
        (p.min_degree, p.max_degree, p.lambda, method.to_string())
    }

    fn delete_random(&self, keep_fraction: f64, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: core_graph::delete_random(&self.inner, keep_fraction, seed).map_err(to_py)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

#[pyclass(module = "rumor", frozen, get_all)]
struct TrialResult {
    completed: bool,
    rounds: u32,
    t_tilde: Option<u32>,
    seed: u64,
    /// `(t, informed, boundary, new)` per round.
    trace: Vec<(u32, u64, u64, u64)>,
}

#[pymethods]
impl TrialResult {
    fn __repr__(&self) -> String {
        format!(
            "TrialResult(completed={}, rounds={}, t_tilde={:?}, seed={})",
            self.completed, self.rounds, self.t_tilde, self.seed
        )
    }
}

/// One trial on an explicit graph.
#[pyfunction]
#[pyo3(signature = (graph, protocol, q, seed, start=0, max_rounds=None))]
fn simulate(graph: &Graph, protocol: &str, q: f64, seed: u64, start: usize, max_rounds: Option<u32>) -> PyResult<TrialResult> {
    let mut cfg = ProtocolConfig::new(self::protocol(protocol)?, q).with_start(start);
    cfg.max_rounds = max_rounds;
    let r = rumor_core::simulate(&graph.inner, &cfg, seed).map_err(to_py)?;
    Ok(TrialResult {
        completed: r.completed,
        rounds: r.rounds,
        t_tilde: r.t_tilde,
        seed: r.seed,
        trace: r
            .trace
            .iter()
            .map(|x| (x.t, x.informed, x.boundary, x.newly_informed))
            .collect(),
    })
}

/// Mean runtime per n for a family sweep, as `[(n, mean_T, completion_rate)]`.
#[pyfunction]
#[pyo3(signature = (family, n_values, protocol, q, trials, seed, p=None, d=None, eps=None))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    family: &str,
    n_values: Vec<usize>,
    protocol: &str,
    q: f64,
    trials: usize,
    seed: u64,
    p: Option<f64>,
    d: Option<usize>,
    eps: Option<f64>,
) -> PyResult<Vec<(usize, Option<f64>, f64)>> {
    let family = Family::from_parts(family, p, d, eps).map_err(to_py)?;
    let cfg = ExperimentConfig::new(family, self::protocol(protocol)?, q, n_values, trials, seed);
    let summary = harness::run_trials(&cfg).map_err(to_py)?;
    Ok(summary
        .points
        .iter()
        .map(|pt| (pt.n, pt.mean_t, pt.completion_rate))
        .collect())
}

#[pyfunction]
fn protocol_constant(protocol: &str, q: f64) -> PyResult<f64> {
    theory::protocol_constant(self::protocol(protocol)?, q).map_err(to_py)
}

#[pyfunction]
fn lambda_max_pp(eps: f64, q: f64) -> PyResult<f64> {
    theory::lambda_max_pp(eps, q).map_err(to_py)
}

/// `((m11, m12), (m21, m22))`.
#[pyfunction]
fn two_block_matrix(eps: f64, q: f64) -> PyResult<((f64, f64), (f64, f64))> {
    let m = theory::two_block_matrix(eps, q).map_err(to_py)?;
    Ok(((m.m11, m.m12), (m.m21(), m.m22)))
}

/// `(value, formula_id)` of the leading-order runtime prediction.
#[pyfunction]
#[pyo3(signature = (family, protocol, n, q, eps=None))]
fn predict_rounds(family: &str, protocol: &str, n: f64, q: f64, eps: Option<f64>) -> PyResult<(f64, String)> {
    let family = match family {
        "expander" | "gnp" | "regular" => Family::Complete,
        other => Family::from_parts(other, None, None, eps).map_err(to_py)?,
    };
    let p = theory::predict_rounds(&family, self::protocol(protocol)?, n, q).map_err(to_py)?;
    Ok((p.value, p.formula_id.to_string()))
}

/// Exact distribution of `|I_{t+1}|` as a list indexed by size.
#[pyfunction]
fn exact_size_pmf(graph: &Graph, informed: Vec<usize>, protocol: &str, q: f64) -> PyResult<Vec<f64>> {
    let pmf = oracle::exact_round_pmf(&graph.inner, &informed, self::protocol(protocol)?, q).map_err(to_py)?;
    Ok(pmf.size_pmf())
}

/// `(variance, mean, pass)`.
#[pyfunction]
fn verify_self_bounding(graph: &Graph, informed: Vec<usize>, protocol: &str, q: f64) -> PyResult<(f64, f64, bool)> {
    let r = oracle::verify_self_bounding(&graph.inner, &informed, self::protocol(protocol)?, q).map_err(to_py)?;
    Ok((r.variance, r.mean, r.pass))
}

#[pyfunction]
fn fit_slope(points: Vec<(f64, f64)>) -> PyResult<(f64, f64, f64)> {
    let fit = harness::fit_slope(&points).map_err(to_py)?;
    Ok((fit.slope, fit.intercept, fit.max_residual))
}

/// `(difference, p_value)` for the one-sided test `mean(a) > mean(b)`.
#[pyfunction]
fn compare_means(a: Vec<f64>, b: Vec<f64>, seed: u64) -> PyResult<(f64, f64)> {
    let c = harness::compare_means(&a, &b, seed).map_err(to_py)?;
    Ok((c.difference, c.p_value))
}

#[pymodule]
fn rumor(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", rumor_core::VERSION)?;
    m.add_class::<Graph>()?;
    m.add_class::<TrialResult>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(protocol_constant, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_max_pp, m)?)?;
    m.add_function(wrap_pyfunction!(two_block_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(predict_rounds, m)?)?;
    m.add_function(wrap_pyfunction!(exact_size_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(verify_self_bounding, m)?)?;
    m.add_function(wrap_pyfunction!(fit_slope, m)?)?;
    m.add_function(wrap_pyfunction!(compare_means, m)?)?;
    Ok(())
}
