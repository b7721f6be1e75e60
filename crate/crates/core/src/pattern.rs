//! The fixed pattern graph F together with its isolated-vertex-free core H.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::{gen_named, GenError};
use crate::graph::{GraphError, HostGraph, Vertex};

#[derive(Debug, Error)]
pub enum PatternError {
    #[error(transparent)]
    Named(#[from] GenError),
    #[error("invalid pattern graph: {0}")]
    Graph(#[from] GraphError),
    #[error("bad pattern id `{0}`")]
    BadId(String),
}

/// Wire form of a pattern: `{"name", "order", "edges"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternSpec {
    pub name: String,
    pub order: usize,
    pub edges: Vec<(Vertex, Vertex)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternSpec", into = "PatternSpec")]
pub struct PatternGraph {
    name: String,
    graph: HostGraph,
    core_vertices: Vec<Vertex>,
    core: HostGraph,
    core_edges: Vec<(Vertex, Vertex)>,
}

impl PatternGraph {
    pub fn new(name: impl Into<String>, graph: HostGraph) -> Self {
        let core_vertices: Vec<Vertex> = (0..graph.n()).filter(|&v| graph.degree(v) > 0).collect();
        let (core, _) = graph.induced_subgraph(&core_vertices);
        let core_edges = core.edge_list();
        Self { name: name.into(), graph, core_vertices, core, core_edges }
    }

    /// Looks up a catalog graph, optionally with isolated vertices appended:
    /// `K4`, `C3`, `K4-e`, `K4+iso`, `C3+2iso`.
    pub fn from_id(id: &str) -> Result<Self, PatternError> {
        let (base, extra) = match id.split_once('+') {
            None => (id, 0),
            Some((base, suffix)) => {
                let count = suffix
                    .strip_suffix("iso")
                    .ok_or_else(|| PatternError::BadId(id.to_string()))?;
                let k = if count.is_empty() {
                    1
                } else {
                    count.parse::<usize>().map_err(|_| PatternError::BadId(id.to_string()))?
                };
                (base, k)
            }
        };
        let g = gen_named(base)?;
        let n = g.n() + extra;
        let graph = HostGraph::from_edges(n, &g.edge_list())?;
        Ok(Self::new(id, graph))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The full pattern F.
    pub fn graph(&self) -> &HostGraph {
        &self.graph
    }

    /// |F|.
    pub fn order(&self) -> usize {
        self.graph.n()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.m()
    }

    /// H: F with isolated vertices removed, relabelled `0..|H|` in ascending
    /// order of the original ids.
    pub fn core(&self) -> &HostGraph {
        &self.core
    }

    /// Original F-ids of the core vertices.
    pub fn core_vertices(&self) -> &[Vertex] {
        &self.core_vertices
    }

    pub fn core_order(&self) -> usize {
        self.core.n()
    }

    /// Core edges `(u, v)`, `u < v`, ascending. Subdivision paths of a witness
    /// are indexed by position in this list.
    pub fn core_edges(&self) -> &[(Vertex, Vertex)] {
        &self.core_edges
    }

    /// |F| − |H|.
    pub fn isolated_count(&self) -> usize {
        self.graph.n() - self.core.n()
    }

    /// H as a standalone pattern (identity when F has no isolated vertices).
    pub fn core_pattern(&self) -> PatternGraph {
        if self.isolated_count() == 0 {
            return self.clone();
        }
        PatternGraph::new(format!("{}-core", self.name), self.core.clone())
    }
}

impl From<PatternGraph> for PatternSpec {
    fn from(p: PatternGraph) -> Self {
        PatternSpec { order: p.graph.n(), edges: p.graph.edge_list(), name: p.name }
    }
}

impl TryFrom<PatternSpec> for PatternGraph {
    type Error = GraphError;

    fn try_from(spec: PatternSpec) -> Result<Self, Self::Error> {
        Ok(PatternGraph::new(spec.name, HostGraph::from_edges(spec.order, &spec.edges)?))
    }
}
