//! Subdivision certificates, packings, and their validation against a host
//! graph.
//!
//! A witness carries its pattern, a branch map indexed by core vertex, one
//! explicit vertex sequence per core edge (in [`PatternGraph::core_edges`]
//! order, running from the image of the smaller endpoint to the image of the
//! larger), and the extra vertices standing in for isolated pattern vertices.
//! Validation is linear in the witness size and never searches for an
//! isomorphism: the branch map is part of the certificate.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::graph::{HostGraph, Vertex};
use crate::pattern::PatternGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionWitness {
    pub pattern: Arc<PatternGraph>,
    pub branch_map: Vec<Vertex>,
    pub subdiv_paths: Vec<Vec<Vertex>>,
    #[serde(default)]
    pub iso_vertices: Vec<Vertex>,
}

impl SubdivisionWitness {
    /// Branch vertices, internal path vertices, then isolated stand-ins.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut out = self.branch_map.clone();
        for p in &self.subdiv_paths {
            if p.len() > 2 {
                out.extend_from_slice(&p[1..p.len() - 1]);
            }
        }
        out.extend_from_slice(&self.iso_vertices);
        out
    }

    /// Σ internal lengths + |branch map| + |iso vertices|.
    pub fn size(&self) -> usize {
        self.branch_map.len()
            + self.subdiv_paths.iter().map(|p| p.len().saturating_sub(2)).sum::<usize>()
            + self.iso_vertices.len()
    }

    /// Vertices of the subdivision proper (no isolated stand-ins).
    pub fn core_vertices(&self) -> Vec<Vertex> {
        let mut v = self.vertices();
        v.truncate(v.len() - self.iso_vertices.len());
        v
    }

    /// Edge set of the subdivision, `(u, v)` with `u < v`, sorted.
    pub fn edge_set(&self) -> Vec<(Vertex, Vertex)> {
        let mut e: Vec<_> = self
            .subdiv_paths
            .iter()
            .flat_map(|p| p.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))))
            .collect();
        e.sort_unstable();
        e
    }

    /// Collapse each subdivision path to an edge between its endpoints.
    pub fn contracted_edges(&self) -> Vec<(Vertex, Vertex)> {
        self.subdiv_paths
            .iter()
            .filter_map(|p| Some((*p.first()?, *p.last()?)))
            .collect()
    }
}

/// Machine-readable reasons a witness is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "code")]
pub enum WitnessIssue {
    BranchMapLength { expected: usize, found: usize },
    PathCount { expected: usize, found: usize },
    VertexOutOfRange { vertex: Vertex },
    BranchNotInjective { vertex: Vertex },
    PathTooShort { edge: usize },
    EndpointMismatch { edge: usize },
    NotAdjacent { edge: usize, from: Vertex, to: Vertex },
    InternalOverlap { vertex: Vertex },
    InternalHitsBranch { vertex: Vertex },
    IsoCount { expected: usize, found: usize },
    IsoOverlap { vertex: Vertex },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WitnessCheck {
    pub reasons: Vec<WitnessIssue>,
}

impl WitnessCheck {
    pub fn is_valid(&self) -> bool {
        self.reasons.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Branch,
    Internal,
    Iso,
}

/// Checks every structural requirement of `w` against `g`.
pub fn validate_witness(g: &HostGraph, w: &SubdivisionWitness) -> WitnessCheck {
    let mut reasons = Vec::new();
    let pattern = &w.pattern;
    let core_n = pattern.core_order();
    if w.branch_map.len() != core_n {
        reasons.push(WitnessIssue::BranchMapLength { expected: core_n, found: w.branch_map.len() });
    }
    if w.subdiv_paths.len() != pattern.core_edges().len() {
        reasons.push(WitnessIssue::PathCount { expected: pattern.core_edges().len(), found: w.subdiv_paths.len() });
    }
    if w.iso_vertices.len() != pattern.isolated_count() {
        reasons.push(WitnessIssue::IsoCount { expected: pattern.isolated_count(), found: w.iso_vertices.len() });
    }
    let all_in_range = w
        .branch_map
        .iter()
        .chain(w.subdiv_paths.iter().flatten())
        .chain(&w.iso_vertices)
        .filter(|&&v| v >= g.n())
        .map(|&v| reasons.push(WitnessIssue::VertexOutOfRange { vertex: v }))
        .count()
        == 0;
    if !all_in_range || !reasons.is_empty() {
        return WitnessCheck { reasons };
    }

    let mut role: HashMap<Vertex, Role> = HashMap::with_capacity(w.size());
    for &b in &w.branch_map {
        if role.insert(b, Role::Branch).is_some() {
            reasons.push(WitnessIssue::BranchNotInjective { vertex: b });
        }
    }
    for (k, (&(a, b), path)) in pattern.core_edges().iter().zip(&w.subdiv_paths).enumerate() {
        if path.len() < 2 {
            reasons.push(WitnessIssue::PathTooShort { edge: k });
            continue;
        }
        if path[0] != w.branch_map[a] || path[path.len() - 1] != w.branch_map[b] {
            reasons.push(WitnessIssue::EndpointMismatch { edge: k });
        }
        for win in path.windows(2) {
            if !g.has_edge(win[0], win[1]) {
                reasons.push(WitnessIssue::NotAdjacent { edge: k, from: win[0], to: win[1] });
            }
        }
        for &x in &path[1..path.len() - 1] {
            match role.insert(x, Role::Internal) {
                None => {}
                Some(Role::Branch) => {
                    role.insert(x, Role::Branch);
                    reasons.push(WitnessIssue::InternalHitsBranch { vertex: x });
                }
                Some(_) => reasons.push(WitnessIssue::InternalOverlap { vertex: x }),
            }
        }
    }
    for &x in &w.iso_vertices {
        if role.insert(x, Role::Iso).is_some() {
            reasons.push(WitnessIssue::IsoOverlap { vertex: x });
        }
    }
    WitnessCheck { reasons }
}

/// Pairwise vertex-disjoint witnesses in a host graph on `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    pub n: usize,
    pub witnesses: Vec<SubdivisionWitness>,
}

impl Packing {
    pub fn new(n: usize) -> Self {
        Self { n, witnesses: Vec::new() }
    }

    /// Union of witness vertex sets, sorted.
    pub fn covered(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self.witnesses.iter().flat_map(|w| w.vertices()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn coverage_fraction(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.covered().len() as f64 / self.n as f64
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("packing serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "code")]
pub enum PackingIssue {
    SizeMismatch { packing_n: usize, graph_n: usize },
    InvalidWitness { index: usize, issues: Vec<WitnessIssue> },
    WitnessOverlap { first: usize, second: usize, vertex: Vertex },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingReport {
    pub valid: bool,
    pub coverage: f64,
    pub covered: usize,
    pub reasons: Vec<PackingIssue>,
}

pub fn validate_packing(g: &HostGraph, p: &Packing) -> PackingReport {
    let mut reasons = Vec::new();
    if p.n != g.n() {
        reasons.push(PackingIssue::SizeMismatch { packing_n: p.n, graph_n: g.n() });
    }
    let mut owner = vec![usize::MAX; g.n()];
    let mut covered = 0usize;
    for (i, w) in p.witnesses.iter().enumerate() {
        let check = validate_witness(g, w);
        if !check.is_valid() {
            reasons.push(PackingIssue::InvalidWitness { index: i, issues: check.reasons });
            continue;
        }
        for v in w.vertices() {
            if owner[v] == usize::MAX {
                owner[v] = i;
                covered += 1;
            } else if owner[v] != i {
                reasons.push(PackingIssue::WitnessOverlap { first: owner[v], second: i, vertex: v });
            }
        }
    }
    let coverage = if g.n() == 0 { 0.0 } else { covered as f64 / g.n() as f64 };
    PackingReport { valid: reasons.is_empty(), coverage, covered, reasons }
}
