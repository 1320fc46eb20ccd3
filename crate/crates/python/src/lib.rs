//! Python module `daf`: queries and graph exports over knowledge-base text.

use daf_core::consequence::entails_with;
use daf_core::{
    evaluate, parse_formula, parse_kb_with, parse_query, to_dot, DafError, Engine,
    GenerationConfig, GraphDump, KbOptions, KnowledgeBase, SemanticsVariant,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(
    daf,
    BoundExceeded,
    PyRuntimeError,
    "The argument universe outgrew its hard cap."
);

fn to_py(e: DafError) -> PyErr {
    match e {
        DafError::BoundExceeded { .. } => BoundExceeded::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn load(kb: &str, facts_settled: bool) -> PyResult<KnowledgeBase> {
    let options = KbOptions {
        facts_settled,
        ..KbOptions::default()
    };
    parse_kb_with(kb, options).map_err(to_py)
}

fn config(hard_cap: Option<usize>) -> GenerationConfig {
    let mut cfg = GenerationConfig::default();
    if let Some(cap) = hard_cap {
        cfg.hard_cap = cap;
    }
    cfg
}

fn variant(name: &str) -> PyResult<SemanticsVariant> {
    name.parse().map_err(to_py)
}

/// Outcome of one query.
#[pyclass(frozen, get_all, module = "daf")]
struct Verdict {
    derivable: bool,
    /// Turnstile rendering, e.g. `G |-DAF O q`.
    text: String,
    /// Proof tree of the accepted argument, when there is one.
    witness: Option<String>,
    arguments: usize,
}

#[pymethods]
impl Verdict {
    fn __repr__(&self) -> String {
        format!("Verdict({:?})", self.text)
    }

    fn __bool__(&self) -> bool {
        self.derivable
    }
}

/// Decide `query` (written `O <formula>`) against knowledge-base text.
#[pyfunction]
#[pyo3(signature = (kb, query, semantics = "basic", engine = "fixpoint", facts_settled = true, hard_cap = None))]
fn decide(
    kb: &str,
    query: &str,
    semantics: &str,
    engine: &str,
    facts_settled: bool,
    hard_cap: Option<usize>,
) -> PyResult<Verdict> {
    let kb = load(kb, facts_settled)?;
    let query = parse_query(query).map_err(to_py)?;
    let engine = match engine {
        "fixpoint" => Engine::Fixpoint,
        "fast" => Engine::FastBasic,
        other => return Err(PyValueError::new_err(format!("unknown engine `{other}`"))),
    };
    let v =
        entails_with(&kb, variant(semantics)?, engine, &query, &config(hard_cap)).map_err(to_py)?;
    Ok(Verdict {
        derivable: v.derivable,
        text: v.to_string(),
        witness: v.witness.map(|w| w.proof),
        arguments: v.universe_stats.arguments,
    })
}

fn dump(
    kb: &str,
    semantics: &str,
    query: Option<&str>,
    facts_settled: bool,
) -> PyResult<GraphDump> {
    let kb = load(kb, facts_settled)?;
    let query = query.map(parse_query).transpose().map_err(to_py)?;
    let e = evaluate(
        &kb,
        variant(semantics)?,
        query.as_ref(),
        &GenerationConfig::default(),
    )
    .map_err(to_py)?;
    Ok(GraphDump::new(&e))
}

/// Argument graph as JSON: universe, edges, grounded ids and stages.
#[pyfunction]
#[pyo3(signature = (kb, semantics = "basic", query = None, facts_settled = true))]
fn graph_json(
    kb: &str,
    semantics: &str,
    query: Option<&str>,
    facts_settled: bool,
) -> PyResult<String> {
    Ok(dump(kb, semantics, query, facts_settled)?.to_json())
}

/// Argument graph as Graphviz DOT.
#[pyfunction]
#[pyo3(signature = (kb, semantics = "basic", query = None, facts_settled = true))]
fn graph_dot(
    kb: &str,
    semantics: &str,
    query: Option<&str>,
    facts_settled: bool,
) -> PyResult<String> {
    Ok(to_dot(&dump(kb, semantics, query, facts_settled)?))
}

/// Parse a formula and render it back in canonical ASCII syntax.
#[pyfunction]
fn normalize(formula: &str) -> PyResult<String> {
    Ok(parse_formula(formula).map_err(to_py)?.to_string())
}

#[pymodule]
fn daf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Verdict>()?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(graph_json, m)?)?;
    m.add_function(wrap_pyfunction!(graph_dot, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add("BoundExceeded", m.py().get_type::<BoundExceeded>())?;
    Ok(())
}
