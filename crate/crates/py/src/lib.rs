use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tfpack::cross_check::cross_check as run_cross_check;
use tfpack::finder::{find_subdivision, FindOutcome, FinderBudget, Strategy};
use tfpack::generators::{gen_lower_bound_gadget, gen_named, gen_random_regular};
use tfpack::graph::HostGraph;
use tfpack::io::{format_edge_list, parse_edge_list, read_edge_list, write_edge_list};
use tfpack::oracle::{optimal_packing as run_optimal, subdivision_exists, OracleLimits};
use tfpack::packer::{pack_full, PackerConfig};
use tfpack::pattern::{PatternGraph, PatternSpec};
use tfpack::witness::{validate_packing, Packing as CorePacking};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serializes `value` and hands it to Python's `json.loads`.
fn to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: serde::de::DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let py = obj.py();
    let text: String = py.import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(value_err)
}

fn parse_strategy(name: &str) -> PyResult<Strategy> {
    match name {
        "exhaustive" => Ok(Strategy::Exhaustive),
        "dense_greedy" | "dense-greedy" => Ok(Strategy::DenseGreedy),
        "auto" => Ok(Strategy::Auto),
        other => Err(PyValueError::new_err(format!("unknown strategy {other:?}"))),
    }
}

/// Simple undirected host graph on vertices `0..n`.
#[pyclass(name = "Graph", frozen)]
pub struct PyGraph {
    inner: HostGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        HostGraph::from_edges(n, &edges).map(|inner| Self { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn random_regular(n: usize, d: usize, seed: u64) -> PyResult<Self> {
        gen_random_regular(n, d, seed).map(|inner| Self { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn named(name: &str) -> PyResult<Self> {
        gen_named(name).map(|inner| Self { inner }).map_err(value_err)
    }

    /// Returns `(graph, u, v)` where `u`, `v` are the two apex vertices.
    #[staticmethod]
    fn gadget(d: usize) -> PyResult<(Self, usize, usize)> {
        let gd = gen_lower_bound_gadget(d).map_err(value_err)?;
        Ok((Self { inner: gd.graph }, gd.u, gd.v))
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        parse_edge_list(text, "<string>").map(|inner| Self { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        read_edge_list(&path).map(|inner| Self { inner }).map_err(|e| PyIOError::new_err(e.to_string()))
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        write_edge_list(&self.inner, &path).map_err(|e| PyIOError::new_err(e.to_string()))
    }

    fn to_edge_list(&self) -> String {
        format_edge_list(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edge_list()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        self.check(v)?;
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn degree(&self, v: usize) -> PyResult<usize> {
        self.check(v)?;
        Ok(self.inner.degree(v))
    }

    fn has_edge(&self, u: usize, v: usize) -> PyResult<bool> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.inner.has_edge(u, v))
    }

    fn average_degree(&self) -> f64 {
        self.inner.average_degree()
    }

    fn is_regular(&self, d: usize) -> bool {
        self.inner.is_regular(d)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

impl PyGraph {
    fn check(&self, v: usize) -> PyResult<()> {
        if v < self.inner.n() {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("vertex {v} out of range for n = {}", self.inner.n())))
        }
    }
}

/// Pattern graph, by catalog id (`"C4"`, `"K4-e"`, `"C3+iso"`, ...) or
/// explicit edges.
#[pyclass(name = "Pattern", frozen)]
pub struct PyPattern {
    inner: Arc<PatternGraph>,
}

#[pymethods]
impl PyPattern {
    #[new]
    fn new(id: &str) -> PyResult<Self> {
        PatternGraph::from_id(id).map(|p| Self { inner: Arc::new(p) }).map_err(value_err)
    }

    #[staticmethod]
    fn from_edges(name: String, order: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let spec = PatternSpec { name, order, edges };
        PatternGraph::try_from(spec).map(|p| Self { inner: Arc::new(p) }).map_err(value_err)
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn isolated_count(&self) -> usize {
        self.inner.isolated_count()
    }

    fn __repr__(&self) -> String {
        format!("Pattern({:?}, order={}, edges={})", self.inner.name(), self.inner.order(), self.inner.edge_count())
    }
}

/// Vertex-disjoint subdivision witnesses in a host graph.
#[pyclass(name = "Packing", frozen)]
pub struct PyPacking {
    inner: CorePacking,
}

#[pymethods]
impl PyPacking {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CorePacking::from_json(text).map(|inner| Self { inner }).map_err(value_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    fn __len__(&self) -> usize {
        self.inner.witnesses.len()
    }

    fn covered(&self) -> Vec<usize> {
        self.inner.covered()
    }

    fn coverage(&self) -> f64 {
        self.inner.coverage_fraction()
    }

    fn witnesses<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.witnesses)
    }

    /// Full validation report against `graph`, as a dict.
    fn validate<'py>(&self, py: Python<'py>, graph: &PyGraph) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &validate_packing(&graph.inner, &self.inner))
    }

    fn __repr__(&self) -> String {
        format!("Packing(n={}, witnesses={})", self.inner.n, self.inner.witnesses.len())
    }
}

fn packer_config(config: Option<&Bound<'_, PyDict>>) -> PyResult<PackerConfig> {
    let cfg: PackerConfig = match config {
        Some(d) => from_py(d.as_any())?,
        None => PackerConfig::default(),
    };
    cfg.validate().map_err(value_err)?;
    Ok(cfg)
}

/// Packs subdivisions of `pattern` into `graph`. `config` takes the keys of
/// the packer configuration (`p`, `m`, `gamma`, `epsilon`, `u_prime_fraction`,
/// `finder`, `seed`, `max_outer_rounds`, `patience`). Returns
/// `(packing, stats)`.
#[pyfunction]
#[pyo3(signature = (graph, pattern, config=None, eta=0.1))]
fn pack<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    pattern: &PyPattern,
    config: Option<&Bound<'py, PyDict>>,
    eta: f64,
) -> PyResult<(PyPacking, Bound<'py, PyAny>)> {
    let cfg = packer_config(config)?;
    let (g, pat) = (&graph.inner, &pattern.inner);
    let out = py.detach(|| pack_full(g, pat, &cfg, eta)).map_err(value_err)?;
    let stats = serde_json::json!({
        "coverage": out.coverage(),
        "invariants_ok": out.invariants_ok(),
        "witnesses": out.packing.witnesses.len(),
        "prefix": &out.prefix,
        "core": out.core.as_ref().map(|c| &c.stats),
    });
    Ok((PyPacking { inner: out.packing }, to_py(py, &stats)?))
}

/// One subdivision of `pattern` in `graph`, as a witness dict, or `None`.
#[pyfunction]
#[pyo3(signature = (graph, pattern, node_budget=1_000_000, strategy="auto", candidate_width=6))]
fn find<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    pattern: &PyPattern,
    node_budget: u64,
    strategy: &str,
    candidate_width: usize,
) -> PyResult<Option<Bound<'py, PyAny>>> {
    let budget = FinderBudget { node_budget, strategy: parse_strategy(strategy)?, candidate_width };
    let (g, pat) = (&graph.inner, &pattern.inner);
    match py.detach(|| find_subdivision(g, pat, budget)).map_err(value_err)? {
        FindOutcome::Found(w) => Ok(Some(to_py(py, &w)?)),
        FindOutcome::NotFound { .. } => Ok(None),
    }
}

fn limits(max_n: usize, max_pattern_edges: usize) -> OracleLimits {
    OracleLimits { max_n, max_pattern_edges, ..OracleLimits::default() }
}

/// Exhaustive existence check for tiny hosts.
#[pyfunction]
#[pyo3(signature = (graph, pattern, max_n=12, max_pattern_edges=6))]
fn oracle_exists(graph: &PyGraph, pattern: &PyPattern, max_n: usize, max_pattern_edges: usize) -> PyResult<bool> {
    let core = Arc::new(pattern.inner.core_pattern());
    if core.edge_count() == 0 {
        return Ok(true);
    }
    subdivision_exists(&graph.inner, &core, &limits(max_n, max_pattern_edges)).map_err(value_err)
}

/// Maximum-coverage packing by exhaustive search; returns `(packing, covered)`.
#[pyfunction]
#[pyo3(signature = (graph, pattern, max_n=12, max_pattern_edges=6))]
fn optimal_packing(
    graph: &PyGraph,
    pattern: &PyPattern,
    max_n: usize,
    max_pattern_edges: usize,
) -> PyResult<(PyPacking, usize)> {
    let opt = run_optimal(&graph.inner, &pattern.inner, &limits(max_n, max_pattern_edges)).map_err(value_err)?;
    Ok((PyPacking { inner: opt.packing }, opt.covered))
}

/// Finder, oracle and packer compared on a tiny host; returns a report dict.
#[pyfunction]
#[pyo3(signature = (graph, pattern, config=None, max_n=12, max_pattern_edges=6))]
fn cross_check<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    pattern: &PyPattern,
    config: Option<&Bound<'py, PyDict>>,
    max_n: usize,
    max_pattern_edges: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = packer_config(config)?;
    let report =
        run_cross_check(&graph.inner, &pattern.inner, &cfg, &limits(max_n, max_pattern_edges)).map_err(value_err)?;
    let dict = to_py(py, &report)?;
    dict.set_item("all_ok", report.all_ok())?;
    Ok(dict)
}

/// Default packer configuration as a dict.
#[pyfunction]
fn default_config(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &PackerConfig::default())
}

#[pymodule]
fn tfpack_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyPattern>()?;
    m.add_class::<PyPacking>()?;
    m.add_function(wrap_pyfunction!(pack, m)?)?;
    m.add_function(wrap_pyfunction!(find, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_exists, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_packing, m)?)?;
    m.add_function(wrap_pyfunction!(cross_check, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    Ok(())
}
