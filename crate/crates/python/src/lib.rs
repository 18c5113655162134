//! Python bindings: `tracer.tokenize`, `tracer.source_to_ir`,
//! `tracer.extract` and the `KnowledgeBase` class with its queries.
//! Structured results come back as plain dicts and lists.

use std::collections::BTreeSet;

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;
use tracer_core::extract::extract as extract_kb;
use tracer_core::ir::load_ir;
use tracer_core::kb::{KbError, KnowledgeBase as Kb};
use tracer_core::lexer;
use tracer_core::pipeline;
use tracer_core::query::{self, QueryError, Selection};

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn query_err(e: QueryError) -> PyErr {
    match e {
        QueryError::NotExpandable(_) => PyValueError::new_err(e.to_string()),
        _ => PyKeyError::new_err(e.to_string()),
    }
}

fn kb_err(e: KbError) -> PyErr {
    match e {
        KbError::UnknownObject(_) | KbError::UnknownType(_) | KbError::UnknownLinkType(_) | KbError::UnknownEndpoint(_) => {
            PyKeyError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn id_set(ids: Option<Vec<String>>) -> Option<BTreeSet<String>> {
    ids.map(|v| v.into_iter().collect())
}

/// Tokens of `source` as `(kind, lexeme, line, col)` tuples.
#[pyfunction]
fn tokenize(source: &str) -> PyResult<Vec<(String, String, u32, u32)>> {
    let tokens = lexer::tokenize(source)
        .map_err(|e| PyValueError::new_err(format!("{}:{}: {}", e.line, e.col, e.message)))?;
    Ok(tokens
        .into_iter()
        .map(|t| (format!("{:?}", t.kind), t.lexeme, t.line, t.col))
        .collect())
}

/// IR XML for one source file.
#[pyfunction]
fn source_to_ir(path: &str, source: &str) -> PyResult<String> {
    pipeline::source_to_ir_xml(path, source).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Build a knowledge base from IR XML documents.
#[pyfunction]
fn extract(ir_documents: Vec<String>) -> PyResult<KnowledgeBase> {
    let docs = ir_documents
        .iter()
        .map(|x| load_ir(x))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(KnowledgeBase { kb: extract_kb(&docs) })
}

#[pyclass(module = "tracer")]
struct KnowledgeBase {
    kb: Kb,
}

#[pymethods]
impl KnowledgeBase {
    /// An empty knowledge base with the built-in types registered.
    #[new]
    fn new() -> Self {
        Self { kb: Kb::new() }
    }

    #[staticmethod]
    fn from_xml(xml: &str) -> PyResult<Self> {
        Kb::from_xml(xml)
            .map(|kb| Self { kb })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_xml(&self) -> String {
        self.kb.to_xml()
    }

    fn object_count(&self) -> usize {
        self.kb.object_count()
    }

    fn link_count(&self) -> usize {
        self.kb.link_count()
    }

    fn types(&self) -> Vec<String> {
        self.kb.types().iter().map(|t| t.id.clone()).collect()
    }

    fn link_types(&self) -> Vec<String> {
        self.kb.link_types().iter().map(|t| t.id.clone()).collect()
    }

    /// Object ids, optionally of one type.
    #[pyo3(signature = (type_id=None))]
    fn object_ids(&self, type_id: Option<&str>) -> Vec<String> {
        match type_id {
            Some(t) => self.kb.objects_of_type(t).map(|o| o.id.clone()).collect(),
            None => self.kb.objects().map(|o| o.id.clone()).collect(),
        }
    }

    fn object<'py>(&self, py: Python<'py>, id: &str) -> PyResult<Bound<'py, PyAny>> {
        let obj = self.kb.object(id).ok_or_else(|| PyKeyError::new_err(id.to_string()))?;
        to_py(py, obj)
    }

    /// Links as `(type, parent, child, seq)` tuples in canonical order.
    fn links(&self) -> Vec<(String, String, String, Option<u32>)> {
        self.kb
            .links()
            .map(|l| (l.link_type.clone(), l.parent.clone(), l.child.clone(), l.seq))
            .collect()
    }

    #[pyo3(signature = (link_type, parent, child, seq=None))]
    fn add_link(&mut self, link_type: &str, parent: &str, child: &str, seq: Option<u32>) -> PyResult<()> {
        self.kb.add_link(link_type, parent, child, seq).map(|_| ()).map_err(kb_err)
    }

    /// Objects reachable from `checked`, keyed by type.
    #[pyo3(signature = (checked, link_types=None, max_depth=None))]
    fn visible_set<'py>(
        &self,
        py: Python<'py>,
        checked: Vec<String>,
        link_types: Option<Vec<String>>,
        max_depth: Option<u32>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let sel = Selection {
            checked_ids: checked.into_iter().collect(),
            enabled_link_types: id_set(link_types),
            max_depth,
        };
        to_py(py, &query::visible_set(&self.kb, &sel).map_err(query_err)?)
    }

    /// Children of the trace tree node at `path`.
    fn expand<'py>(&self, py: Python<'py>, path: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &query::expand(&self.kb, &path).map_err(query_err)?)
    }

    fn attributes<'py>(&self, py: Python<'py>, id: &str) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &query::object_attributes(&self.kb, id).map_err(query_err)?)
    }

    #[pyo3(signature = (targets, from_type, link_types=None))]
    fn reverse_related(&self, targets: Vec<String>, from_type: &str, link_types: Option<Vec<String>>) -> PyResult<Vec<String>> {
        let targets = targets.into_iter().collect();
        let filter = id_set(link_types);
        query::reverse_related(&self.kb, &targets, from_type, filter.as_ref())
            .map(|s| s.into_iter().collect())
            .map_err(query_err)
    }

    fn __len__(&self) -> usize {
        self.kb.object_count()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.kb == other.kb
    }

    fn __repr__(&self) -> String {
        format!("<KnowledgeBase {} objects, {} links>", self.kb.object_count(), self.kb.link_count())
    }
}

#[pymodule]
fn tracer(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(source_to_ir, m)?)?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    m.add_class::<KnowledgeBase>()?;
    Ok(())
}
