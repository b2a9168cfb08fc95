//! Python module `henson`.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use henson_core::config::RunConfig as CoreConfig;
use henson_core::construction::{self, RunError};
use henson_core::folkman::{self, FolkmanError};
use henson_core::graph::FiniteGraph;
use henson_core::graph6;
use henson_core::presentation::Presentation as CorePresentation;
use henson_core::trace::{coloring_from_text, coloring_to_text, Trace};
use henson_core::verify::{self, Check};

create_exception!(henson, ExhaustedError, PyRuntimeError, "A bounded search found nothing.");

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn decode(text: &str) -> PyResult<FiniteGraph> {
    graph6::decode_graph6(text).map_err(value_error)
}

fn encode(g: &FiniteGraph) -> PyResult<String> {
    graph6::encode_graph6(g).map_err(value_error)
}

/// The computable presentation of the Henson graph H_n, built lazily.
#[pyclass]
struct Presentation {
    inner: CorePresentation,
}

#[pymethods]
impl Presentation {
    #[new]
    fn new(n: usize) -> PyResult<Self> {
        Ok(Presentation { inner: CorePresentation::new(n).map_err(value_error)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn built_stage(&self) -> usize {
        self.inner.built_stage()
    }

    fn ensure_stage(&mut self, t: usize) {
        self.inner.ensure_stage(t);
    }

    fn adjacent(&mut self, i: usize, j: usize) -> bool {
        self.inner.adjacent(i, j)
    }

    fn neighbors(&mut self, x: usize, m: usize) -> Vec<usize> {
        self.inner.neighbor_set_within(x, m)
    }

    /// The induced graph on the first `m` vertices, as graph6.
    fn restriction(&mut self, m: usize) -> PyResult<String> {
        encode(&self.inner.restriction(m))
    }

    fn find_extension(&mut self, a: Vec<usize>, b: Vec<usize>, bound: usize) -> PyResult<usize> {
        self.inner.find_extension(&a, &b, bound).map_err(value_error)
    }

    /// `gamma` is graph6 on `len(delta) + 1` vertices.
    fn extend_copy(&mut self, delta: Vec<usize>, gamma: &str, bound: usize) -> PyResult<usize> {
        self.inner.extend_copy(&delta, &decode(gamma)?, bound).map_err(value_error)
    }
}

#[pyclass(get_all)]
struct FolkmanCertificate {
    graph6: String,
    n: usize,
    k: usize,
    vertices: usize,
    edges: usize,
    candidates_examined: u64,
    partitions_checked: u64,
}

#[pyfunction]
#[pyo3(signature = (n, k, max_vertices = 6))]
fn folkman_witness(n: usize, k: usize, max_vertices: usize) -> PyResult<FolkmanCertificate> {
    let cert = folkman::folkman_witness(n, k, max_vertices).map_err(|e| match e {
        FolkmanError::Exhausted { .. } => ExhaustedError::new_err(e.to_string()),
        other => value_error(other),
    })?;
    Ok(FolkmanCertificate {
        graph6: encode(&cert.graph)?,
        n: cert.n,
        k: cert.k,
        vertices: cert.graph.vertex_count(),
        edges: cert.graph.edge_count(),
        candidates_examined: cert.candidates_examined,
        partitions_checked: cert.partitions_checked,
    })
}

/// Whether every `k`-partition of the graph leaves a block with a K_{n-1}.
#[pyfunction]
fn partition_ramsey_check(graph6: &str, n: usize, k: usize) -> PyResult<bool> {
    Ok(folkman::partition_ramsey_check(&decode(graph6)?, n, k))
}

#[pyclass]
struct RunConfig {
    inner: CoreConfig,
}

#[pymethods]
impl RunConfig {
    /// Parses TOML config text.
    #[staticmethod]
    fn parse(source: &str) -> PyResult<Self> {
        let inner = CoreConfig::parse(source).map_err(value_error)?;
        inner.roster().map_err(value_error)?;
        Ok(RunConfig { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn stages(&self) -> usize {
        self.inner.stages
    }

    /// Display names of the registered adversaries.
    #[getter]
    fn adversaries(&self) -> PyResult<Vec<String>> {
        Ok(self.inner.roster().map_err(value_error)?.names())
    }
}

#[pyclass(get_all)]
struct RunResult {
    /// One letter per vertex, `R` or `B`.
    coloring: String,
    trace_jsonl: String,
    coloring_text: String,
}

#[pyfunction]
fn run(config: &RunConfig) -> PyResult<RunResult> {
    let c = &config.inner;
    let roster = c.roster().map_err(value_error)?;
    let out = construction::run(c.n, &roster, c.stages).map_err(|e| match e {
        RunError::Target { .. } => ExhaustedError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    })?;
    Ok(RunResult {
        coloring: out.coloring.iter().map(|c| c.letter()).collect(),
        trace_jsonl: out.trace.to_jsonl(),
        coloring_text: coloring_to_text(&out.coloring),
    })
}

#[pyclass(get_all)]
struct VerificationReport {
    all_passed: bool,
    failed_checks: Vec<String>,
    report: String,
}

#[pymethods]
impl VerificationReport {
    fn __str__(&self) -> String {
        self.report.clone()
    }
}

/// Replays a trace against the config's roster and checks V1-V6.
#[pyfunction]
fn verify_trace(config: &RunConfig, trace_jsonl: &str, coloring_text: &str) -> PyResult<VerificationReport> {
    let c = &config.inner;
    let roster = c.roster().map_err(value_error)?;
    let trace = Trace::from_jsonl(trace_jsonl).map_err(value_error)?;
    let coloring = coloring_from_text(coloring_text).map_err(value_error)?;
    let mut p = CorePresentation::new(c.n).map_err(value_error)?;
    let report = verify::verify_trace(&trace, &coloring, &mut p, &roster);
    Ok(VerificationReport {
        all_passed: report.all_passed(),
        failed_checks: report.failed_checks().iter().map(Check::to_string).collect(),
        report: report.to_string(),
    })
}

#[pymodule]
fn henson(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ExhaustedError", m.py().get_type::<ExhaustedError>())?;
    m.add_class::<Presentation>()?;
    m.add_class::<FolkmanCertificate>()?;
    m.add_class::<RunConfig>()?;
    m.add_class::<RunResult>()?;
    m.add_class::<VerificationReport>()?;
    m.add_function(wrap_pyfunction!(folkman_witness, m)?)?;
    m.add_function(wrap_pyfunction!(partition_ramsey_check, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(verify_trace, m)?)?;
    Ok(())
}
