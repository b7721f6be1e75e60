//! Search for a subdivision of a pattern inside a host graph.
//!
//! Two strategies are provided. `Exhaustive` enumerates every injective
//! branch placement and every system of internally disjoint paths, so a
//! completed search certifies absence. `DenseGreedy` places branch vertices
//! from a short candidate list (high degree first, then vertices close to
//! already placed neighbours), routes each pattern edge along a shortest path
//! through unused vertices, and backtracks over placements within the node
//! budget; if that fails it restarts on a denser core of the graph.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{HostGraph, Vertex};
use crate::pattern::PatternGraph;
use crate::witness::{validate_witness, SubdivisionWitness};

/// Hosts up to this order are searched exhaustively under `Auto`.
pub const AUTO_EXHAUSTIVE_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Exhaustive,
    DenseGreedy,
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinderBudget {
    pub node_budget: u64,
    pub strategy: Strategy,
    /// Candidates tried per branch vertex by the greedy search.
    #[serde(default = "default_width")]
    pub candidate_width: usize,
}

fn default_width() -> usize {
    6
}

impl Default for FinderBudget {
    fn default() -> Self {
        Self { node_budget: 10_000, strategy: Strategy::Auto, candidate_width: default_width() }
    }
}

impl FinderBudget {
    pub fn exhaustive(node_budget: u64) -> Self {
        Self { node_budget, strategy: Strategy::Exhaustive, ..Self::default() }
    }

    pub fn greedy(node_budget: u64) -> Self {
        Self { node_budget, strategy: Strategy::DenseGreedy, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FindOutcome {
    Found(SubdivisionWitness),
    /// `certified` is true only when an exhaustive search completed.
    NotFound { certified: bool },
}

impl FindOutcome {
    pub fn witness(self) -> Option<SubdivisionWitness> {
        match self {
            FindOutcome::Found(w) => Some(w),
            FindOutcome::NotFound { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinderError {
    #[error("search budget of {nodes} nodes exhausted")]
    BudgetExhausted { nodes: u64 },
    #[error("complete bipartite parts of sizes {ax} and {ay} are below the required {need}")]
    PartsTooSmall { need: usize, ax: usize, ay: usize },
    #[error("pattern `{0}` has isolated vertices; search for its core instead")]
    PatternHasIsolatedVertices(String),
    #[error("node budget must be at least 1")]
    InvalidBudget,
}

/// `2e(G)/|G| >= threshold`; false for the empty graph.
pub fn mader_threshold_check(g: &HostGraph, threshold: f64) -> bool {
    g.n() > 0 && 2.0 * g.m() as f64 / g.n() as f64 >= threshold
}

/// Average degree above which the greedy search is expected to succeed.
pub fn default_density_threshold(pattern: &PatternGraph) -> f64 {
    8.0 * pattern.edge_count() as f64
}

pub fn find_subdivision(
    g: &HostGraph,
    pattern: &Arc<PatternGraph>,
    budget: FinderBudget,
) -> Result<FindOutcome, FinderError> {
    if pattern.isolated_count() > 0 {
        return Err(FinderError::PatternHasIsolatedVertices(pattern.name().to_string()));
    }
    if budget.node_budget == 0 {
        return Err(FinderError::InvalidBudget);
    }
    let exhaustive = match budget.strategy {
        Strategy::Exhaustive => true,
        Strategy::DenseGreedy => false,
        Strategy::Auto => g.n() <= AUTO_EXHAUSTIVE_MAX_N,
    };
    let outcome = if exhaustive { exhaustive_search(g, pattern, budget.node_budget)? } else { greedy_search(g, pattern, budget)? };
    if let FindOutcome::Found(w) = &outcome {
        let check = validate_witness(g, w);
        assert!(check.is_valid(), "finder produced an invalid witness: {:?}", check.reasons);
    }
    Ok(outcome)
}

/// Pattern vertices in BFS order from a maximum-degree vertex (lowest id on
/// ties), restarting per component.
fn pattern_order(h: &HostGraph) -> Vec<usize> {
    let k = h.n();
    let mut seen = vec![false; k];
    let mut order = Vec::with_capacity(k);
    while order.len() < k {
        let root = (0..k).filter(|&a| !seen[a]).max_by_key(|&a| (h.degree(a), std::cmp::Reverse(a))).unwrap();
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            order.push(a);
            for &b in h.neighbors(a) {
                if !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
    }
    order
}

/// For each step of `order`, the core-edge indices completed by placing that
/// vertex.
fn edges_closed_at(pattern: &PatternGraph, order: &[usize]) -> Vec<Vec<usize>> {
    let mut step = vec![0; order.len()];
    for (i, &a) in order.iter().enumerate() {
        step[a] = i;
    }
    let mut out = vec![Vec::new(); order.len()];
    for (e, &(a, b)) in pattern.core_edges().iter().enumerate() {
        out[step[a].max(step[b])].push(e);
    }
    out
}

struct Search<'a> {
    g: &'a HostGraph,
    pattern: &'a PatternGraph,
    order: Vec<usize>,
    closes: Vec<Vec<usize>>,
    branch: Vec<Vertex>,
    paths: Vec<Vec<Vertex>>,
    used: Vec<bool>,
    nodes: u64,
    budget: u64,
}

struct OutOfBudget;

impl<'a> Search<'a> {
    fn new(g: &'a HostGraph, pattern: &'a PatternGraph, budget: u64) -> Self {
        let order = pattern_order(pattern.core());
        let closes = edges_closed_at(pattern, &order);
        Search {
            g,
            pattern,
            closes,
            order,
            branch: vec![usize::MAX; pattern.core_order()],
            paths: vec![Vec::new(); pattern.core_edges().len()],
            used: vec![false; g.n()],
            nodes: 0,
            budget,
        }
    }

    fn tick(&mut self) -> Result<(), OutOfBudget> {
        self.nodes += 1;
        if self.nodes > self.budget {
            Err(OutOfBudget)
        } else {
            Ok(())
        }
    }

    fn witness(&self, pattern: &Arc<PatternGraph>) -> SubdivisionWitness {
        SubdivisionWitness {
            pattern: Arc::clone(pattern),
            branch_map: self.branch.clone(),
            subdiv_paths: self.paths.clone(),
            iso_vertices: Vec::new(),
        }
    }

    // ---- exhaustive ----

    fn place_all(&mut self, i: usize) -> Result<bool, OutOfBudget> {
        if i == self.order.len() {
            return Ok(true);
        }
        let a = self.order[i];
        let need = self.pattern.core().degree(a);
        for v in 0..self.g.n() {
            if self.used[v] || self.g.degree(v) < need {
                continue;
            }
            self.tick()?;
            self.branch[a] = v;
            self.used[v] = true;
            let done = self.route_all(i, 0)?;
            if done {
                return Ok(true);
            }
            self.used[v] = false;
        }
        Ok(false)
    }

    fn route_all(&mut self, i: usize, j: usize) -> Result<bool, OutOfBudget> {
        if j == self.closes[i].len() {
            return self.place_all(i + 1);
        }
        let e = self.closes[i][j];
        let (a, b) = self.pattern.core_edges()[e];
        let (src, dst) = (self.branch[a], self.branch[b]);
        let mut path = vec![src];
        self.walk(i, j, e, dst, &mut path)
    }

    fn walk(&mut self, i: usize, j: usize, e: usize, dst: Vertex, path: &mut Vec<Vertex>) -> Result<bool, OutOfBudget> {
        let cur = *path.last().unwrap();
        let g = self.g;
        for &w in g.neighbors(cur) {
            if w == dst {
                self.tick()?;
                path.push(w);
                self.paths[e] = path.clone();
                path.pop();
                if self.route_all(i, j + 1)? {
                    return Ok(true);
                }
            } else if !self.used[w] {
                self.tick()?;
                self.used[w] = true;
                path.push(w);
                let done = self.walk(i, j, e, dst, path)?;
                path.pop();
                self.used[w] = false;
                if done {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    // ---- greedy ----

    fn greedy_place(&mut self, i: usize, alive: &[bool], deg: &[usize], ranked: &[Vertex], width: usize) -> Result<bool, OutOfBudget> {
        if i == self.order.len() {
            return Ok(true);
        }
        let a = self.order[i];
        let h = self.pattern.core();
        let need = h.degree(a);
        let anchor = h.neighbors(a).iter().map(|&b| self.branch[b]).find(|&v| v != usize::MAX);
        let candidates: Vec<Vertex> = match anchor {
            Some(src) => self.nearby(src, alive, |v| deg[v] >= need, width),
            None => ranked.iter().copied().filter(|&v| !self.used[v] && deg[v] >= need).take(width).collect(),
        };
        for v in candidates {
            self.tick()?;
            self.branch[a] = v;
            self.used[v] = true;
            let mut routed = Vec::new();
            let mut ok = true;
            for idx in 0..self.closes[i].len() {
                let e = self.closes[i][idx];
                let (x, y) = self.pattern.core_edges()[e];
                match self.shortest_route(self.branch[x], self.branch[y], alive) {
                    Some(p) => {
                        for &u in &p[1..p.len() - 1] {
                            self.used[u] = true;
                        }
                        self.paths[e] = p;
                        routed.push(e);
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && self.greedy_place(i + 1, alive, deg, ranked, width)? {
                return Ok(true);
            }
            for e in routed {
                let p = std::mem::take(&mut self.paths[e]);
                for &u in &p[1..p.len() - 1] {
                    self.used[u] = false;
                }
            }
            self.used[v] = false;
            self.branch[a] = usize::MAX;
        }
        Ok(false)
    }

    /// Unused vertices accepted by `accept`, in BFS order from `src` through
    /// unused live vertices.
    fn nearby(&self, src: Vertex, alive: &[bool], accept: impl Fn(Vertex) -> bool, width: usize) -> Vec<Vertex> {
        let mut seen = vec![false; self.g.n()];
        seen[src] = true;
        let mut queue = VecDeque::from([src]);
        let mut out = Vec::new();
        while let Some(u) = queue.pop_front() {
            for &w in self.g.neighbors(u) {
                if seen[w] || self.used[w] || !alive[w] {
                    continue;
                }
                seen[w] = true;
                if accept(w) {
                    out.push(w);
                    if out.len() == width {
                        return out;
                    }
                }
                queue.push_back(w);
            }
        }
        out
    }

    fn shortest_route(&self, src: Vertex, dst: Vertex, alive: &[bool]) -> Option<Vec<Vertex>> {
        let n = self.g.n();
        let mut prev = vec![usize::MAX; n];
        prev[src] = src;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &w in self.g.neighbors(u) {
                if w == dst {
                    let mut path = vec![dst, u];
                    let mut cur = u;
                    while cur != src {
                        cur = prev[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                if prev[w] == usize::MAX && !self.used[w] && alive[w] {
                    prev[w] = u;
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

fn exhaustive_search(g: &HostGraph, pattern: &Arc<PatternGraph>, budget: u64) -> Result<FindOutcome, FinderError> {
    let mut s = Search::new(g, pattern, budget);
    match s.place_all(0) {
        Ok(true) => Ok(FindOutcome::Found(s.witness(pattern))),
        Ok(false) => Ok(FindOutcome::NotFound { certified: true }),
        Err(OutOfBudget) => Err(FinderError::BudgetExhausted { nodes: budget }),
    }
}

/// Live-vertex mask after repeatedly deleting vertices of live degree below
/// `min_deg(current)`.
fn strip(g: &HostGraph, mut alive: Vec<bool>, min_deg: impl Fn(&[usize], &[bool]) -> usize) -> Vec<bool> {
    loop {
        let deg: Vec<usize> = (0..g.n()).map(|v| if alive[v] { g.degree_into(v, &alive) } else { 0 }).collect();
        let threshold = min_deg(&deg, &alive);
        let doomed: Vec<Vertex> = (0..g.n()).filter(|&v| alive[v] && deg[v] < threshold).collect();
        if doomed.is_empty() {
            return alive;
        }
        for v in doomed {
            alive[v] = false;
        }
    }
}

fn greedy_search(g: &HostGraph, pattern: &Arc<PatternGraph>, budget: FinderBudget) -> Result<FindOutcome, FinderError> {
    let n = g.n();
    let min_pattern_deg = pattern.core().min_degree();
    let mut alive = vec![true; n];
    if pattern.core_order() > 0 && min_pattern_deg >= 2 {
        alive = strip(g, alive, |_, _| 2);
    }
    let dense = strip(g, alive.clone(), |deg, alive| {
        let live = alive.iter().filter(|&&a| a).count();
        if live == 0 {
            return 0;
        }
        let avg = deg.iter().sum::<usize>() as f64 / live as f64;
        (avg / 2.0).ceil() as usize
    });

    let first_budget = (budget.node_budget / 2).max(1);
    let mut spent_all = false;
    let passes: Vec<(Vec<bool>, u64)> = if dense != alive && dense.iter().any(|&a| a) {
        vec![(alive, first_budget), (dense, budget.node_budget - first_budget)]
    } else {
        vec![(alive, budget.node_budget)]
    };
    for (mask, pass_budget) in passes {
        if pass_budget == 0 {
            continue;
        }
        let deg: Vec<usize> = (0..n).map(|v| if mask[v] { g.degree_into(v, &mask) } else { 0 }).collect();
        let mut ranked: Vec<Vertex> = (0..n).filter(|&v| mask[v]).collect();
        ranked.sort_by_key(|&v| (std::cmp::Reverse(deg[v]), v));
        let mut s = Search::new(g, pattern, pass_budget);
        match s.greedy_place(0, &mask, &deg, &ranked, budget.candidate_width.max(1)) {
            Ok(true) => return Ok(FindOutcome::Found(s.witness(pattern))),
            Ok(false) => {}
            Err(OutOfBudget) => spent_all = true,
        }
    }
    if spent_all {
        Err(FinderError::BudgetExhausted { nodes: budget.node_budget })
    } else {
        Ok(FindOutcome::NotFound { certified: false })
    }
}

/// Explicit subdivision between two sides of a complete bipartite graph.
/// Bipartite patterns embed directly with colour classes on opposite sides;
/// otherwise every branch vertex sits in `ax` and every edge is routed
/// through its own middle vertex of `ay`. Both sides must hold `|F|²`
/// vertices.
pub fn find_in_complete_bipartite(
    ax: &[Vertex],
    ay: &[Vertex],
    pattern: &Arc<PatternGraph>,
) -> Result<SubdivisionWitness, FinderError> {
    if pattern.isolated_count() > 0 {
        return Err(FinderError::PatternHasIsolatedVertices(pattern.name().to_string()));
    }
    let k = pattern.core_order();
    let need = k * k;
    if ax.len() < need || ay.len() < need {
        return Err(FinderError::PartsTooSmall { need, ax: ax.len(), ay: ay.len() });
    }
    let edges = pattern.core_edges();
    let (branch_map, subdiv_paths) = match pattern.core().bipartition() {
        Some(colour) => {
            let (mut nx, mut ny) = (0, 0);
            let branch: Vec<Vertex> = colour
                .iter()
                .map(|&c| {
                    if c == 0 {
                        nx += 1;
                        ax[nx - 1]
                    } else {
                        ny += 1;
                        ay[ny - 1]
                    }
                })
                .collect();
            let paths = edges.iter().map(|&(a, b)| vec![branch[a], branch[b]]).collect();
            (branch, paths)
        }
        None => {
            let branch: Vec<Vertex> = ax[..k].to_vec();
            let paths = edges.iter().enumerate().map(|(e, &(a, b))| vec![branch[a], ay[e], branch[b]]).collect();
            (branch, paths)
        }
    };
    Ok(SubdivisionWitness { pattern: Arc::clone(pattern), branch_map, subdiv_paths, iso_vertices: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_named, gen_random_regular};
    use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};

    fn pat(id: &str) -> Arc<PatternGraph> {
        Arc::new(PatternGraph::from_id(id).unwrap())
    }

    #[test]
    fn k4_in_k5_all_strategies() {
        let g = gen_named("K5").unwrap();
        for strategy in [Strategy::Exhaustive, Strategy::DenseGreedy, Strategy::Auto] {
            let b = FinderBudget { strategy, ..FinderBudget::default() };
            let w = find_subdivision(&g, &pat("K4"), b).unwrap().witness().unwrap();
            assert!(w.subdiv_paths.iter().all(|p| p.len() == 2));
        }
    }

    #[test]
    fn k4_in_petersen() {
        let g = gen_named("petersen").unwrap();
        let out = find_subdivision(&g, &pat("K4"), FinderBudget::exhaustive(1_000_000)).unwrap();
        assert!(matches!(out, FindOutcome::Found(_)));
        let greedy = find_subdivision(&g, &pat("K4"), FinderBudget::greedy(100_000)).unwrap();
        assert!(matches!(greedy, FindOutcome::Found(_)));
    }

    #[test]
    fn no_k4_in_cycle() {
        let g = gen_named("C7").unwrap();
        let out = find_subdivision(&g, &pat("K4"), FinderBudget::exhaustive(1_000)).unwrap();
        assert_eq!(out, FindOutcome::NotFound { certified: true });
        let greedy = find_subdivision(&g, &pat("K4"), FinderBudget::greedy(1_000)).unwrap();
        assert_eq!(greedy, FindOutcome::NotFound { certified: false });
    }

    #[test]
    fn cycle_finds_triangle_subdivision() {
        let g = gen_named("C7").unwrap();
        let w = find_subdivision(&g, &pat("C3"), FinderBudget::greedy(1_000)).unwrap().witness().unwrap();
        assert_eq!(w.size(), 7);
    }

    #[test]
    fn tiny_budget_is_reported() {
        let g = gen_named("petersen").unwrap();
        let err = find_subdivision(&g, &pat("K4"), FinderBudget::exhaustive(3)).unwrap_err();
        assert_eq!(err, FinderError::BudgetExhausted { nodes: 3 });
        assert_eq!(
            find_subdivision(&g, &pat("K4"), FinderBudget::exhaustive(0)).unwrap_err(),
            FinderError::InvalidBudget
        );
    }

    #[test]
    fn isolated_patterns_are_rejected() {
        let g = gen_named("K5").unwrap();
        assert!(matches!(
            find_subdivision(&g, &pat("K4+iso"), FinderBudget::default()),
            Err(FinderError::PatternHasIsolatedVertices(_))
        ));
    }

    #[test]
    fn greedy_on_dense_random_graph() {
        let g = gen_random_regular(300, 20, 1).unwrap();
        for id in ["C3", "C4", "K4", "K4-e", "petersen"] {
            let w = find_subdivision(&g, &pat(id), FinderBudget::greedy(10_000)).unwrap().witness();
            assert!(w.is_some(), "{id}");
        }
    }

    #[test]
    fn threshold_check() {
        assert!(mader_threshold_check(&gen_named("K5").unwrap(), 4.0));
        assert!(!mader_threshold_check(&HostGraph::empty(10), 0.1));
        assert!(mader_threshold_check(&gen_named("C7").unwrap(), 2.0));
        assert!(!mader_threshold_check(&HostGraph::empty(0), 0.0));
        assert_eq!(default_density_threshold(&pat("C4")), 32.0);
    }

    fn complete_bipartite(a: usize, b: usize) -> (HostGraph, Vec<usize>, Vec<usize>) {
        let g = gen_named(&format!("K{a},{b}")).unwrap();
        (g, (0..a).collect(), (a..a + b).collect())
    }

    #[test]
    fn bipartite_endgame_triangle() {
        let (g, ax, ay) = complete_bipartite(9, 9);
        let w = find_in_complete_bipartite(&ax, &ay, &pat("C3")).unwrap();
        assert!(validate_witness(&g, &w).is_valid());
        assert!(w.branch_map.iter().all(|v| ax.contains(v)));
        assert!(w.subdiv_paths.iter().all(|p| p.len() == 3 && ay.contains(&p[1])));
    }

    #[test]
    fn bipartite_endgame_k4_and_c4() {
        let (g, ax, ay) = complete_bipartite(16, 16);
        let w = find_in_complete_bipartite(&ax, &ay, &pat("K4")).unwrap();
        assert!(validate_witness(&g, &w).is_valid());
        assert_eq!(w.size(), 10);
        let w = find_in_complete_bipartite(&ax, &ay, &pat("C4")).unwrap();
        assert!(validate_witness(&g, &w).is_valid());
        assert_eq!(w.size(), 4);
        assert_eq!(
            find_in_complete_bipartite(&ax[..15], &ay, &pat("K4")).unwrap_err(),
            FinderError::PartsTooSmall { need: 16, ax: 15, ay: 16 }
        );
    }

    fn graph_from_bits(n: usize, bits: u64) -> HostGraph {
        let mut edges = Vec::new();
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                if (bits >> (k % 64)) & 1 == 1 {
                    edges.push((u, v));
                }
                k += 1;
            }
        }
        HostGraph::from_edges(n, &edges).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn exhaustive_is_monotone_under_edge_addition(n in 4usize..8, bits in any::<u64>(), extra in any::<u64>()) {
            let g = graph_from_bits(n, bits);
            let bigger = graph_from_bits(n, bits | extra);
            for id in ["C3", "C4", "K4"] {
                let a = find_subdivision(&g, &pat(id), FinderBudget::exhaustive(u64::MAX)).unwrap();
                if matches!(a, FindOutcome::Found(_)) {
                    let b = find_subdivision(&bigger, &pat(id), FinderBudget::exhaustive(u64::MAX)).unwrap();
                    prop_assert!(matches!(b, FindOutcome::Found(_)));
                }
            }
        }

        #[test]
        fn greedy_witnesses_always_validate(n in 6usize..30, bits in any::<u64>(), seed in any::<u64>()) {
            let d = 3 + (bits % 4) as usize;
            let n = n.max(d + 1) + (n.max(d + 1) * d) % 2;
            let g = gen_random_regular(n, d, seed).unwrap();
            for id in ["C3", "C4", "K4", "K4-e"] {
                if let Ok(FindOutcome::Found(w)) = find_subdivision(&g, &pat(id), FinderBudget::greedy(2_000)) {
                    prop_assert!(validate_witness(&g, &w).is_valid());
                }
            }
        }
    }
}
