//! Ground truth for tiny instances: exhaustive subdivision enumeration,
//! exact maximum-coverage packing, and a generator of all graphs on a few
//! vertices up to isomorphism.
//!
//! The search here works on bitmask adjacency and shares no code with the
//! finder or the packer.

use std::collections::{BTreeSet, HashSet};
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{HostGraph, Vertex};
use crate::pattern::PatternGraph;
use crate::witness::{Packing, SubdivisionWitness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleLimits {
    pub max_n: usize,
    pub max_pattern_edges: usize,
    /// Search nodes allowed per query before giving up.
    pub node_budget: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_n: 12, max_pattern_edges: 6, node_budget: 500_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle limits exceeded: {0}")]
    LimitsExceeded(String),
    #[error("pattern `{0}` has isolated vertices; enumerate its core instead")]
    PatternHasIsolatedVertices(String),
}

fn check_limits(g: &HostGraph, pattern: &PatternGraph, limits: &OracleLimits) -> Result<(), OracleError> {
    if g.n() > limits.max_n.min(32) {
        return Err(OracleError::LimitsExceeded(format!("host order {} > {}", g.n(), limits.max_n)));
    }
    if pattern.edge_count() > limits.max_pattern_edges {
        return Err(OracleError::LimitsExceeded(format!(
            "pattern has {} edges > {}",
            pattern.edge_count(),
            limits.max_pattern_edges
        )));
    }
    Ok(())
}

fn bits(mut mask: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

fn mask_adjacency(g: &HostGraph) -> Vec<u32> {
    (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w)).collect()
}

type Visitor<'v> = dyn FnMut(&[Vertex], &[Vec<Vertex>], u32) -> ControlFlow<()> + 'v;

struct Enumerator<'a> {
    adj: Vec<u32>,
    edges: &'a [(usize, usize)],
    need: Vec<u32>,
    allowed: u32,
    branch: Vec<Vertex>,
    paths: Vec<Vec<Vertex>>,
    nodes: u64,
    budget: u64,
}

impl<'a> Enumerator<'a> {
    fn new(g: &HostGraph, pattern: &'a PatternGraph, allowed: u32, budget: u64) -> Self {
        let h = pattern.core();
        Enumerator {
            adj: mask_adjacency(g),
            edges: pattern.core_edges(),
            need: (0..h.n()).map(|a| h.degree(a) as u32).collect(),
            allowed,
            branch: vec![0; h.n()],
            paths: vec![Vec::new(); pattern.core_edges().len()],
            nodes: 0,
            budget,
        }
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::LimitsExceeded(format!("search exceeded {} nodes", self.budget)));
        }
        Ok(())
    }

    fn assign(&mut self, a: usize, used: u32, visit: &mut Visitor) -> Result<ControlFlow<()>, OracleError> {
        if a == self.branch.len() {
            return self.route(0, used, visit);
        }
        for v in bits(self.allowed & !used) {
            if (self.adj[v] & self.allowed).count_ones() < self.need[a] {
                continue;
            }
            self.tick()?;
            self.branch[a] = v;
            if self.assign(a + 1, used | 1 << v, visit)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    fn route(&mut self, e: usize, used: u32, visit: &mut Visitor) -> Result<ControlFlow<()>, OracleError> {
        if e == self.edges.len() {
            return Ok(visit(&self.branch, &self.paths, used));
        }
        let (a, b) = self.edges[e];
        let (src, dst) = (self.branch[a], self.branch[b]);
        let mut path = vec![src];
        self.extend(e, dst, used, &mut path, visit)
    }

    fn extend(
        &mut self,
        e: usize,
        dst: Vertex,
        used: u32,
        path: &mut Vec<Vertex>,
        visit: &mut Visitor,
    ) -> Result<ControlFlow<()>, OracleError> {
        self.tick()?;
        let cur = *path.last().unwrap();
        if self.adj[cur] >> dst & 1 == 1 {
            path.push(dst);
            self.paths[e] = path.clone();
            path.pop();
            if self.route(e + 1, used, visit)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        for w in bits(self.adj[cur] & self.allowed & !used) {
            path.push(w);
            let flow = self.extend(e, dst, used | 1 << w, path, visit)?;
            path.pop();
            if flow.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

fn to_witness(pattern: &Arc<PatternGraph>, branch: &[Vertex], paths: &[Vec<Vertex>]) -> SubdivisionWitness {
    SubdivisionWitness {
        pattern: Arc::clone(pattern),
        branch_map: branch.to_vec(),
        subdiv_paths: paths.to_vec(),
        iso_vertices: Vec::new(),
    }
}

fn edge_key(paths: &[Vec<Vertex>]) -> Vec<(Vertex, Vertex)> {
    let mut e: Vec<_> = paths.iter().flat_map(|p| p.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1])))).collect();
    e.sort_unstable();
    e
}

/// Every subdivision subgraph of `pattern` in `g`, one witness per distinct
/// (vertex set, edge set), in discovery order.
pub fn enumerate_subdivisions(
    g: &HostGraph,
    pattern: &Arc<PatternGraph>,
    limits: &OracleLimits,
) -> Result<Vec<SubdivisionWitness>, OracleError> {
    check_limits(g, pattern, limits)?;
    if pattern.isolated_count() > 0 {
        return Err(OracleError::PatternHasIsolatedVertices(pattern.name().to_string()));
    }
    let all = if g.n() == 32 { u32::MAX } else { (1u32 << g.n()) - 1 };
    let mut seen: HashSet<(u32, Vec<(Vertex, Vertex)>)> = HashSet::new();
    let mut out = Vec::new();
    let mut en = Enumerator::new(g, pattern, all, limits.node_budget);
    let _ = en.assign(0, 0, &mut |branch, paths, used| {
        if seen.insert((used, edge_key(paths))) {
            out.push(to_witness(pattern, branch, paths));
        }
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Whether any subdivision exists; stops at the first one.
pub fn subdivision_exists(g: &HostGraph, pattern: &Arc<PatternGraph>, limits: &OracleLimits) -> Result<bool, OracleError> {
    Ok(spanning_witness(g, pattern, None, limits)?.is_some())
}

/// A witness using exactly the vertices of `exact` (any witness when `None`).
fn spanning_witness(
    g: &HostGraph,
    pattern: &Arc<PatternGraph>,
    exact: Option<u32>,
    limits: &OracleLimits,
) -> Result<Option<SubdivisionWitness>, OracleError> {
    check_limits(g, pattern, limits)?;
    let core = pattern.core_pattern();
    let core = Arc::new(core);
    let allowed = exact.unwrap_or(if g.n() == 32 { u32::MAX } else { (1u32 << g.n()) - 1 });
    let mut found = None;
    let mut en = Enumerator::new(g, &core, allowed, limits.node_budget);
    let _ = en.assign(0, 0, &mut |branch, paths, used| {
        if exact.map_or(true, |s| s == used) {
            found = Some(to_witness(&core, branch, paths));
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalPacking {
    pub packing: Packing,
    pub covered: usize,
    /// Branch-and-bound nodes visited; the search always runs to completion,
    /// which is the optimality certificate.
    pub nodes: u64,
    /// Distinct vertex sets that carry a subdivision.
    pub candidate_sets: usize,
}

/// Connected components of `g[mask]` as masks.
fn mask_components(adj: &[u32], mask: u32) -> usize {
    let mut left = mask;
    let mut count = 0;
    while left != 0 {
        let start = left & left.wrapping_neg();
        let mut comp = start;
        loop {
            let grown = bits(comp).fold(comp, |c, v| c | (adj[v] & mask));
            if grown == comp {
                break;
            }
            comp = grown;
        }
        left &= !comp;
        count += 1;
    }
    count
}

/// Maximum-coverage packing of `pattern` subdivisions (isolated pattern
/// vertices are matched by arbitrary leftover vertices).
pub fn optimal_packing(g: &HostGraph, pattern: &Arc<PatternGraph>, limits: &OracleLimits) -> Result<OptimalPacking, OracleError> {
    check_limits(g, pattern, limits)?;
    let n = g.n();
    let iso = pattern.isolated_count();
    let k = pattern.core_order();
    if k == 0 {
        // edgeless pattern: disjoint groups of |F| arbitrary vertices
        let groups = if iso == 0 { 0 } else { n / iso };
        let mut packing = Packing::new(n);
        for i in 0..groups {
            packing.witnesses.push(SubdivisionWitness {
                pattern: Arc::clone(pattern),
                branch_map: Vec::new(),
                subdiv_paths: Vec::new(),
                iso_vertices: (i * iso..(i + 1) * iso).collect(),
            });
        }
        return Ok(OptimalPacking { covered: groups * iso, packing, nodes: 0, candidate_sets: 0 });
    }
    let adj = mask_adjacency(g);
    let core_components = pattern.core().components().len();
    let mut candidates: Vec<(u32, SubdivisionWitness)> = Vec::new();
    for s in 1u32..(1u32 << n) {
        if (s.count_ones() as usize) < k || mask_components(&adj, s) > core_components {
            continue;
        }
        if let Some(w) = spanning_witness(g, pattern, Some(s), limits)? {
            candidates.push((s, w));
        }
    }
    let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, (s, _)) in candidates.iter().enumerate() {
        by_vertex[s.trailing_zeros() as usize].push(i);
    }

    struct Bb<'c> {
        n: usize,
        iso: usize,
        k: usize,
        candidates: &'c [(u32, SubdivisionWitness)],
        by_lowest: &'c [Vec<usize>],
        best: usize,
        best_pick: Vec<usize>,
        pick: Vec<usize>,
        nodes: u64,
    }
    impl Bb<'_> {
        fn value(&self, covered_core: usize) -> Option<usize> {
            let extra = self.iso * self.pick.len();
            (self.n - covered_core >= extra).then_some(covered_core + extra)
        }

        // `decided`: vertices covered or deliberately left out
        fn go(&mut self, covered: u32, decided: u32) {
            self.nodes += 1;
            let covered_core = covered.count_ones() as usize;
            let undecided = (!decided).count_ones() as usize;
            let bound = (covered_core + undecided + self.iso * (self.pick.len() + undecided / self.k)).min(self.n);
            if bound <= self.best {
                return;
            }
            if undecided == 0 {
                if let Some(v) = self.value(covered_core) {
                    if v > self.best {
                        self.best = v;
                        self.best_pick = self.pick.clone();
                    }
                }
                return;
            }
            let v = (!decided).trailing_zeros() as usize;
            // candidates whose lowest vertex is v and that avoid decided vertices
            for idx in 0..self.by_lowest[v].len() {
                let c = self.by_lowest[v][idx];
                let s = self.candidates[c].0;
                if s & decided == 0 {
                    self.pick.push(c);
                    self.go(covered | s, decided | s);
                    self.pick.pop();
                }
            }
            self.go(covered, decided | 1 << v);
        }
    }
    let all_bits = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut bb = Bb {
        n,
        iso,
        k,
        candidates: &candidates,
        by_lowest: &by_vertex,
        best: 0,
        best_pick: Vec::new(),
        pick: Vec::new(),
        nodes: 0,
    };
    // vertices beyond n count as decided
    bb.go(0, !all_bits);

    let mut packing = Packing::new(n);
    let mut taken: u32 = bb.best_pick.iter().fold(0, |m, &c| m | candidates[c].0);
    for &c in &bb.best_pick {
        let mut w = candidates[c].1.clone();
        w.pattern = Arc::clone(pattern);
        for _ in 0..iso {
            let free = (!taken & all_bits).trailing_zeros() as usize;
            taken |= 1 << free;
            w.iso_vertices.push(free);
        }
        packing.witnesses.push(w);
    }
    Ok(OptimalPacking { covered: bb.best, packing, nodes: bb.nodes, candidate_sets: candidates.len() })
}

// ---------------------------------------------------------------------------
// Non-isomorphic graph generation

/// Equitable refinement: repeatedly split colour classes by the multiset of
/// neighbour colours. Colours stay ranked consistently with the input.
fn refine(adj: &[u32], mut colour: Vec<usize>) -> Vec<usize> {
    let n = adj.len();
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = bits(adj[v]).map(|w| colour[w]).collect();
                nb.sort_unstable();
                (colour[v], nb)
            })
            .collect();
        let distinct: BTreeSet<&(usize, Vec<usize>)> = sigs.iter().collect();
        let ranked: Vec<&(usize, Vec<usize>)> = distinct.into_iter().collect();
        let next: Vec<usize> = sigs.iter().map(|s| ranked.binary_search(&s).unwrap()).collect();
        let before = colour.iter().collect::<BTreeSet<_>>().len();
        if ranked.len() == before {
            return next;
        }
        colour = next;
    }
}

fn code_of(adj: &[u32], colour: &[usize]) -> u64 {
    let n = adj.len();
    let mut order = vec![0; n];
    for v in 0..n {
        order[colour[v]] = v;
    }
    let mut code = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            code = code << 1 | (adj[order[i]] >> order[j] & 1) as u64;
        }
    }
    code
}

fn canon_search(adj: &[u32], colour: Vec<usize>, best: &mut u64) {
    let n = adj.len();
    let mut size = vec![0usize; n];
    colour.iter().for_each(|&c| size[c] += 1);
    let Some(cell) = (0..n).find(|&c| size[c] > 1) else {
        *best = (*best).min(code_of(adj, &colour));
        return;
    };
    for v in (0..n).filter(|&v| colour[v] == cell) {
        let split: Vec<usize> =
            (0..n).map(|u| 2 * colour[u] + usize::from(colour[u] == cell && u != v)).collect();
        let ranks: BTreeSet<usize> = split.iter().copied().collect();
        let ranks: Vec<usize> = ranks.into_iter().collect();
        let compact = split.iter().map(|c| ranks.binary_search(c).unwrap()).collect();
        canon_search(adj, refine(adj, compact), best);
    }
}

/// Canonical code: the minimum upper-triangle adjacency bitstring over the
/// orderings reached by individualisation and refinement. Two graphs on the
/// same vertex count share a code iff they are isomorphic. `n <= 11`.
pub fn canonical_code(g: &HostGraph) -> u64 {
    assert!(g.n() <= 11, "canonical codes are limited to 11 vertices");
    let adj = mask_adjacency(g);
    let mut best = u64::MAX;
    canon_search(&adj, refine(&adj, vec![0; g.n()]), &mut best);
    best
}

fn decode(n: usize, code: u64) -> HostGraph {
    let mut edges = Vec::new();
    let total = n * n.saturating_sub(1) / 2;
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if code >> (total - 1 - k) & 1 == 1 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    HostGraph::from_edges(n, &edges).expect("decoded codes are simple graphs")
}

/// All graphs on `n` vertices up to isomorphism, in canonical form, ordered
/// by canonical code. `n <= 9`.
pub fn all_graphs(n: usize) -> Vec<HostGraph> {
    assert!(n <= 9, "exhaustive generation is limited to 9 vertices");
    let mut level: BTreeSet<u64> = BTreeSet::from([0]);
    for size in 1..=n {
        let mut next = BTreeSet::new();
        for &code in &level {
            let parent = decode(size - 1, code);
            let base = parent.edge_list();
            for nbrs in 0u32..(1u32 << (size - 1)) {
                let mut edges = base.clone();
                edges.extend(bits(nbrs).map(|w| (w, size - 1)));
                let child = HostGraph::from_edges(size, &edges).expect("simple by construction");
                next.insert(canonical_code(&child));
            }
        }
        level = next;
    }
    level.into_iter().map(|c| decode(n, c)).collect()
}

/// Connected graphs on `n` vertices up to isomorphism.
pub fn connected_graphs(n: usize) -> Vec<HostGraph> {
    all_graphs(n).into_iter().filter(HostGraph::is_connected).collect()
}
