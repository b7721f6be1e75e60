//! The packing loop and the isolated-vertex driver.
//!
//! [`pack_core`] splits the host into a large part `V` and a small part `W`,
//! covers most of `V` with paths on `m` vertices, and then repeatedly builds
//! an auxiliary graph on sampled unused `W` vertices whose edges stand for
//! unused cover paths. A pattern subdivision found there expands into one in
//! the host that consumes whole cover paths and few `W` vertices.
//!
//! [`pack_full`] handles patterns with isolated vertices: it packs the core
//! pattern away from a small reserve set, keeps the largest witnesses that
//! reach the coverage target, and pads each with spare vertices.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finder::{find_in_complete_bipartite, find_subdivision, FindOutcome, FinderBudget, Strategy};
use crate::graph::{HostGraph, Vertex};
use crate::partition::{partition, split_v_w_tracking, subset_request, Split};
use crate::path_cover::{build_path_cover, PathCoverParams, PathCoverStats};
use crate::pattern::PatternGraph;
use crate::rng::mix;
use crate::witness::{validate_witness, Packing, SubdivisionWitness};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PackerConfig {
    /// Fraction of vertices placed in the small side `W`.
    pub p: f64,
    /// Vertices per cover path.
    pub m: usize,
    pub gamma: f64,
    pub epsilon: f64,
    /// Sampling rate for the auxiliary vertex set; `ε / 2p` when unset.
    pub u_prime_fraction: Option<f64>,
    pub finder: FinderBudget,
    pub seed: u64,
    pub max_outer_rounds: usize,
    /// Consecutive rounds without an insertion before stopping.
    pub patience: usize,
}

impl Default for PackerConfig {
    fn default() -> Self {
        Self {
            p: 0.25,
            m: 8,
            gamma: 0.35,
            epsilon: 0.1,
            u_prime_fraction: Some(0.1),
            finder: FinderBudget { node_budget: 10_000, strategy: Strategy::DenseGreedy, candidate_width: 6 },
            seed: 0,
            max_outer_rounds: 10_000,
            patience: 3,
        }
    }
}

impl PackerConfig {
    pub fn p1(&self) -> f64 {
        self.u_prime_fraction.unwrap_or(self.epsilon / (2.0 * self.p))
    }

    pub fn validate(&self) -> Result<(), PackerError> {
        let bad = |msg: String| Err(PackerError::InvalidConfig(msg));
        if !(self.p > 0.0 && self.p < 0.5) {
            return bad(format!("p = {} must lie in (0, 1/2)", self.p));
        }
        if self.m < 2 {
            return bad(format!("m = {} must be at least 2", self.m));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon = {} must lie in (0, 1)", self.epsilon));
        }
        if !(self.gamma > 0.0 && self.gamma <= 0.5) {
            return bad(format!("gamma = {} must lie in (0, 1/2]", self.gamma));
        }
        let p1 = self.p1();
        if !(p1 > 0.0 && p1 <= 1.0) {
            return bad(format!("sampling fraction {p1} must lie in (0, 1]"));
        }
        if self.finder.node_budget == 0 {
            return bad("finder node budget must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PackerError {
    #[error("invalid packer configuration: {0}")]
    InvalidConfig(String),
    #[error("{stage} failed: {message}")]
    PipelineStageFailed { stage: &'static str, message: String },
    #[error("auxiliary edge {0:?} carries no path label")]
    LabelMissing((usize, usize)),
}

/// Label of an auxiliary edge: the cover path it stands for, and which of its
/// two endpoints (local id) attaches to the path's first vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeLabel {
    pub path: usize,
    pub x_end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryGraph {
    /// Host ids of the local vertices `0..k`.
    pub vertices: Vec<Vertex>,
    pub graph: HostGraph,
    /// Keyed by `(a, b)` with `a < b`, local ids.
    pub labels: HashMap<(usize, usize), EdgeLabel>,
}

impl AuxiliaryGraph {
    pub fn used_labels(&self) -> HashSet<usize> {
        self.labels.values().map(|l| l.path).collect()
    }
}

fn local_neighbours(g: &HostGraph, v: Vertex, local: &HashMap<Vertex, usize>) -> Vec<usize> {
    let mut out: Vec<usize> = g.neighbors(v).iter().filter_map(|w| local.get(w).copied()).collect();
    out.sort_unstable();
    out
}

/// Smallest unordered pair `{a, b}` with `a` adjacent to `x` and `b` adjacent
/// to `y` (either way round), not yet an edge. Returns `(a, b, x_end)`.
fn first_admissible(
    nx: &[usize],
    ny: &[usize],
    taken: &HashSet<(usize, usize)>,
) -> Option<(usize, usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for &a in nx {
        for &b in ny {
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            if taken.contains(&key) {
                continue;
            }
            if best.map_or(true, |(p, q, _)| key < (p, q)) {
                best = Some((key.0, key.1, a));
            }
        }
    }
    best
}

/// Maximal auxiliary graph on `u_prime`: paths are scanned in ascending
/// index order and each takes the smallest admissible free pair.
pub fn build_aux(g: &HostGraph, u_prime: &[Vertex], candidates: &[usize], paths: &[Vec<Vertex>]) -> AuxiliaryGraph {
    let mut vertices = u_prime.to_vec();
    vertices.sort_unstable();
    let local: HashMap<Vertex, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut order = candidates.to_vec();
    order.sort_unstable();
    let mut taken = HashSet::new();
    let mut labels = HashMap::new();
    for j in order {
        let path = &paths[j];
        let nx = local_neighbours(g, path[0], &local);
        let ny = local_neighbours(g, path[path.len() - 1], &local);
        if let Some((a, b, x_end)) = first_admissible(&nx, &ny, &taken) {
            taken.insert((a, b));
            labels.insert((a, b), EdgeLabel { path: j, x_end });
        }
    }
    let mut edges: Vec<(usize, usize)> = taken.into_iter().collect();
    edges.sort_unstable();
    let graph = HostGraph::from_edges(vertices.len(), &edges).expect("auxiliary edges are distinct pairs");
    AuxiliaryGraph { vertices, graph, labels }
}

/// True when no unused candidate path admits a new edge.
pub fn aux_is_maximal(g: &HostGraph, aux: &AuxiliaryGraph, candidates: &[usize], paths: &[Vec<Vertex>]) -> bool {
    let local: HashMap<Vertex, usize> = aux.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let used = aux.used_labels();
    let taken: HashSet<(usize, usize)> = aux.labels.keys().copied().collect();
    candidates.iter().filter(|j| !used.contains(j)).all(|&j| {
        let path = &paths[j];
        let nx = local_neighbours(g, path[0], &local);
        let ny = local_neighbours(g, path[path.len() - 1], &local);
        first_admissible(&nx, &ny, &taken).is_none()
    })
}

/// Replaces every auxiliary edge of `w_aux` by the host path
/// `a, x, ..., y, b` through its labelled cover path.
pub fn expand_witness(
    w_aux: &SubdivisionWitness,
    aux: &AuxiliaryGraph,
    paths: &[Vec<Vertex>],
) -> Result<SubdivisionWitness, PackerError> {
    let host = |l: usize| aux.vertices[l];
    let mut subdiv_paths = Vec::with_capacity(w_aux.subdiv_paths.len());
    for local_path in &w_aux.subdiv_paths {
        let mut out = vec![host(local_path[0])];
        for step in local_path.windows(2) {
            let (s, t) = (step[0], step[1]);
            let key = (s.min(t), s.max(t));
            let label = aux.labels.get(&key).ok_or(PackerError::LabelMissing(key))?;
            let cover = &paths[label.path];
            if label.x_end == s {
                out.extend(cover.iter().copied());
            } else {
                out.extend(cover.iter().rev().copied());
            }
            out.push(host(t));
        }
        subdiv_paths.push(out);
    }
    Ok(SubdivisionWitness {
        pattern: Arc::clone(&w_aux.pattern),
        branch_map: w_aux.branch_map.iter().map(|&l| host(l)).collect(),
        subdiv_paths,
        iso_vertices: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PackStats {
    pub rounds: usize,
    pub witnesses: usize,
    pub endgame_witnesses: usize,
    pub paths: usize,
    pub j_final: usize,
    /// Mean average degree of the auxiliary graphs over all rounds.
    pub aux_density: f64,
    /// `|J| m / (p n)` at the end of the run.
    pub j_claim_ratio: f64,
    pub split_ok: bool,
    pub split_rounds: usize,
    pub cover: Option<PathCoverStats>,
    pub finder_budget_exhausted: usize,
    pub sampling_ok: bool,
    pub invariants_ok: bool,
    pub invariant_failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackOutcome {
    pub packing: Packing,
    pub stats: PackStats,
    /// The small side of the split.
    pub w: Vec<Vertex>,
    /// Cover paths of the large side.
    pub paths: Vec<Vec<Vertex>>,
}

/// Violations of the family invariants, recomputed from scratch: every
/// member uses cover paths all-or-nothing and meets `W` in at most
/// `2|H|/m` vertices; members are disjoint; and `W` usage sums correctly.
pub fn family_violations(n: usize, packing: &Packing, w: &[Vertex], paths: &[Vec<Vertex>], m: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut in_w = vec![false; n];
    w.iter().for_each(|&v| in_w[v] = true);
    let mut path_of = vec![NONE; n];
    for (j, p) in paths.iter().enumerate() {
        p.iter().for_each(|&v| path_of[v] = j);
    }
    let mut owner = vec![NONE; n];
    let mut w_total = 0;
    for (i, h) in packing.witnesses.iter().enumerate() {
        let verts = h.core_vertices();
        let size = verts.len();
        let mut hits: HashMap<usize, usize> = HashMap::new();
        let mut in_w_count = 0;
        for &v in &verts {
            if owner[v] != NONE && owner[v] != i {
                out.push(format!("witnesses {} and {i} share vertex {v}", owner[v]));
            }
            owner[v] = i;
            if path_of[v] != NONE {
                *hits.entry(path_of[v]).or_insert(0) += 1;
            }
            if in_w[v] {
                in_w_count += 1;
            }
        }
        for (j, count) in hits {
            if count != paths[j].len() {
                out.push(format!("witness {i} uses {count} of {} vertices of path {j}", paths[j].len()));
            }
        }
        if in_w_count * m > 2 * size {
            out.push(format!("witness {i} has {in_w_count} vertices in W but size {size} (m = {m})"));
        }
        w_total += in_w_count;
    }
    let w_used = (0..n).filter(|&v| in_w[v] && owner[v] != NONE).count();
    if w_used != w_total {
        out.push(format!("W usage {w_used} differs from the per-witness sum {w_total}"));
    }
    if w_used * m > 2 * n {
        out.push(format!("W usage {w_used} exceeds 2n/m"));
    }
    out
}

struct Loop<'a> {
    g: &'a HostGraph,
    pattern: &'a Arc<PatternGraph>,
    cfg: &'a PackerConfig,
    d: f64,
    w: Vec<Vertex>,
    in_w: Vec<bool>,
    paths: Vec<Vec<Vertex>>,
    used: Vec<bool>,
    path_used: Vec<bool>,
    packing: Packing,
    stats: PackStats,
    density_sum: f64,
    density_rounds: usize,
}

impl Loop<'_> {
    fn unused_paths(&self) -> Vec<usize> {
        (0..self.paths.len()).filter(|&j| !self.path_used[j]).collect()
    }

    /// Paths in J whose endpoints both have fewer than `pd/2` neighbours in
    /// the used part of `W`.
    fn clean_paths(&self, unused: &[usize]) -> Vec<usize> {
        let used_w: Vec<bool> = (0..self.g.n()).map(|v| self.in_w[v] && self.used[v]).collect();
        let limit = self.cfg.p * self.d / 2.0;
        unused
            .iter()
            .copied()
            .filter(|&j| {
                let p = &self.paths[j];
                [p[0], p[p.len() - 1]].iter().all(|&e| (self.g.degree_into(e, &used_w) as f64) < limit)
            })
            .collect()
    }

    fn sample_u_prime(&mut self, clean: &[usize], round: usize) -> Vec<Vertex> {
        let u: Vec<Vertex> = self.w.iter().copied().filter(|&v| !self.used[v]).collect();
        let p1 = self.cfg.p1();
        if p1 >= 1.0 {
            return u;
        }
        let in_u: Vec<bool> = (0..self.g.n()).map(|v| self.in_w[v] && !self.used[v]).collect();
        let threshold = self.cfg.p * self.d / 3.0;
        let anchors: Vec<Vertex> = clean
            .iter()
            .flat_map(|&j| [self.paths[j][0], self.paths[j][self.paths[j].len() - 1]])
            .filter(|&e| self.g.degree_into(e, &in_u) as f64 >= threshold)
            .collect();
        let seed = mix(self.cfg.seed, 1000 + round as u64);
        let req = match subset_request(self.g, &anchors, &u, p1, self.cfg.gamma, threshold) {
            Ok(r) => r,
            Err(_) => return u,
        };
        match partition(&req, seed) {
            Ok(mut r) => r.classes.swap_remove(0),
            Err(e) => {
                self.stats.sampling_ok = false;
                match e.best_effort() {
                    Some(b) => b.classes[0].clone(),
                    None => u,
                }
            }
        }
    }

    fn insert(&mut self, w: SubdivisionWitness) -> bool {
        let check = validate_witness(self.g, &w);
        if !check.is_valid() {
            self.stats.invariant_failures.push(format!("expanded witness invalid: {:?}", check.reasons));
            return false;
        }
        for v in w.vertices() {
            self.used[v] = true;
        }
        let mut in_path = vec![NONE; self.g.n()];
        for (j, p) in self.paths.iter().enumerate() {
            if !self.path_used[j] {
                p.iter().for_each(|&v| in_path[v] = j);
            }
        }
        for v in w.vertices() {
            if in_path[v] != NONE {
                self.path_used[in_path[v]] = true;
            }
        }
        self.packing.witnesses.push(w);
        let failures = family_violations(self.g.n(), &self.packing, &self.w, &self.paths, self.cfg.m);
        if failures.is_empty() {
            true
        } else {
            self.stats.invariant_failures.extend(failures);
            false
        }
    }

    /// One round: sample, build the auxiliary graph, and insert witnesses
    /// until neither the search nor the bipartite fallback yields one.
    /// Returns the number inserted, or `None` on an invariant failure.
    fn round(&mut self, round: usize) -> Option<usize> {
        let unused = self.unused_paths();
        let clean = self.clean_paths(&unused);
        let u_prime = self.sample_u_prime(&clean, round);
        let aux = build_aux(self.g, &u_prime, &clean, &self.paths);
        if !aux.vertices.is_empty() {
            self.density_sum += 2.0 * aux.graph.m() as f64 / aux.vertices.len() as f64;
        }
        self.density_rounds += 1;
        let labelled = aux.used_labels();
        let mut alive = vec![true; aux.vertices.len()];
        let mut inserted = 0;
        loop {
            let keep: Vec<usize> = (0..aux.vertices.len()).filter(|&l| alive[l]).collect();
            let (residual, map) = aux.graph.induced_subgraph(&keep);
            if residual.m() == 0 {
                break;
            }
            let found = match find_subdivision(&residual, self.pattern, self.cfg.finder) {
                Ok(FindOutcome::Found(w)) => Some(w),
                Ok(FindOutcome::NotFound { .. }) => None,
                Err(_) => {
                    self.stats.finder_budget_exhausted += 1;
                    None
                }
            };
            let (w_local, endgame) = match found {
                Some(w) => (relabel(&w, &map), false),
                None => match self.bipartite_fallback(&aux, &alive, &labelled, &clean) {
                    Some(w) => (w, true),
                    None => break,
                },
            };
            let expanded = match expand_witness(&w_local, &aux, &self.paths) {
                Ok(w) => w,
                Err(e) => {
                    self.stats.invariant_failures.push(e.to_string());
                    return None;
                }
            };
            for l in w_local.vertices() {
                alive[l] = false;
            }
            if !self.insert(expanded) {
                return None;
            }
            inserted += 1;
            if endgame {
                self.stats.endgame_witnesses += 1;
            }
        }
        Some(inserted)
    }

    /// When the search fails: an unlabelled clean path `j` sees all pairs
    /// between its endpoint neighbourhoods in the (maximal) auxiliary graph,
    /// so those neighbourhoods span a complete bipartite subgraph.
    fn bipartite_fallback(
        &self,
        aux: &AuxiliaryGraph,
        alive: &[bool],
        labelled: &HashSet<usize>,
        clean: &[usize],
    ) -> Option<SubdivisionWitness> {
        let k = self.pattern.core_order();
        let need = k * k;
        let local: HashMap<Vertex, usize> = aux.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        for &j in clean.iter().filter(|j| !labelled.contains(j)) {
            let p = &self.paths[j];
            let nx: Vec<usize> =
                local_neighbours(self.g, p[0], &local).into_iter().filter(|&l| alive[l]).collect();
            let ny: Vec<usize> =
                local_neighbours(self.g, p[p.len() - 1], &local).into_iter().filter(|&l| alive[l]).collect();
            let ny_set: HashSet<usize> = ny.iter().copied().collect();
            let mut ax: Vec<usize> = nx.iter().copied().filter(|l| !ny_set.contains(l)).collect();
            ax.extend(nx.iter().copied().filter(|l| ny_set.contains(l)));
            ax.truncate(need);
            ax.sort_unstable();
            let ay: Vec<usize> = ny.iter().copied().filter(|l| !ax.contains(l)).take(need).collect();
            if ax.len() < need || ay.len() < need {
                continue;
            }
            if !ax.iter().all(|&a| ay.iter().all(|&b| aux.graph.has_edge(a, b))) {
                continue;
            }
            if let Ok(w) = find_in_complete_bipartite(&ax, &ay, self.pattern) {
                return Some(w);
            }
        }
        None
    }
}

fn relabel(w: &SubdivisionWitness, map: &[usize]) -> SubdivisionWitness {
    SubdivisionWitness {
        pattern: Arc::clone(&w.pattern),
        branch_map: w.branch_map.iter().map(|&v| map[v]).collect(),
        subdiv_paths: w.subdiv_paths.iter().map(|p| p.iter().map(|&v| map[v]).collect()).collect(),
        iso_vertices: w.iso_vertices.iter().map(|&v| map[v]).collect(),
    }
}

/// Packs subdivisions of an isolated-free pattern.
pub fn pack_core(g: &HostGraph, pattern: &Arc<PatternGraph>, cfg: &PackerConfig) -> Result<PackOutcome, PackerError> {
    cfg.validate()?;
    if pattern.isolated_count() > 0 {
        return Err(PackerError::InvalidConfig(format!("pattern `{}` has isolated vertices", pattern.name())));
    }
    if pattern.edge_count() == 0 {
        return Err(PackerError::InvalidConfig("pattern needs at least one edge".into()));
    }
    let n = g.n();
    let d = g.average_degree();
    let tracked: Vec<Vertex> = (0..n)
        .filter(|&v| {
            let deg = g.degree(v) as f64;
            deg >= (1.0 - cfg.gamma) * d - 1e-9 && deg <= (1.0 + cfg.gamma) * d + 1e-9
        })
        .collect();
    let (split, split_ok) = match split_v_w_tracking(g, &tracked, cfg.p, cfg.gamma, d, mix(cfg.seed, 1)) {
        Ok(s) => (s, true),
        Err(e) => match Split::from_best_effort(&e) {
            Some(s) => (s, false),
            None => return Err(PackerError::PipelineStageFailed { stage: "split", message: e.to_string() }),
        },
    };
    let params =
        PathCoverParams { m: cfg.m, d: (1.0 - cfg.p) * d, gamma: cfg.gamma, epsilon: cfg.epsilon, seed: mix(cfg.seed, 2) };
    let cover = build_path_cover(g, &split.v, params)
        .map_err(|e| PackerError::PipelineStageFailed { stage: "path cover", message: e.to_string() })?;

    let mut in_w = vec![false; n];
    split.w.iter().for_each(|&v| in_w[v] = true);
    let mut state = Loop {
        g,
        pattern,
        cfg,
        d,
        in_w,
        w: split.w.clone(),
        used: vec![false; n],
        path_used: vec![false; cover.paths.len()],
        paths: cover.paths,
        packing: Packing::new(n),
        stats: PackStats {
            split_ok,
            split_rounds: split.result.resample_rounds,
            cover: Some(cover.stats),
            sampling_ok: true,
            invariants_ok: true,
            ..PackStats::default()
        },
        density_sum: 0.0,
        density_rounds: 0,
    };
    state.stats.paths = state.paths.len();

    let mut stale = 0;
    for round in 0..cfg.max_outer_rounds {
        if state.path_used.iter().all(|&u| u) {
            break;
        }
        state.stats.rounds = round + 1;
        match state.round(round) {
            None => {
                state.stats.invariants_ok = false;
                break;
            }
            Some(0) => {
                stale += 1;
                if stale >= cfg.patience.max(1) {
                    break;
                }
            }
            Some(_) => stale = 0,
        }
    }
    let mut stats = state.stats;
    stats.witnesses = state.packing.witnesses.len();
    stats.j_final = state.path_used.iter().filter(|&&u| !u).count();
    stats.j_claim_ratio = if n == 0 { 0.0 } else { stats.j_final as f64 * cfg.m as f64 / (cfg.p * n as f64) };
    stats.aux_density = if state.density_rounds == 0 { 0.0 } else { state.density_sum / state.density_rounds as f64 };
    Ok(PackOutcome { packing: state.packing, stats, w: state.w, paths: state.paths })
}

/// Outcome of choosing how many of the (size-sorted) core witnesses to keep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prefix {
    pub keep: usize,
    /// `z_j = Σ_{i ≤ j} (|T_i| + extra)`.
    pub z: Vec<usize>,
    pub target_met: bool,
}

/// Keeps the shortest prefix whose padded size reaches `(1 - η) n` provided
/// it still fits in `n` vertices; otherwise the longest prefix that fits.
pub fn select_prefix(sizes_desc: &[usize], extra: usize, n: usize, eta: f64) -> Prefix {
    let mut z = Vec::with_capacity(sizes_desc.len());
    let mut acc = 0;
    for &s in sizes_desc {
        acc += s + extra;
        z.push(acc);
    }
    let target = (1.0 - eta) * n as f64;
    let fits = z.iter().take_while(|&&zj| zj <= n).count();
    match z.iter().position(|&zj| zj as f64 >= target - 1e-9) {
        Some(i) if z[i] <= n => Prefix { keep: i + 1, z, target_met: true },
        _ => Prefix { keep: fits, z, target_met: false },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullOutcome {
    pub packing: Packing,
    /// The core run, in host ids; `None` for edgeless patterns.
    pub core: Option<PackOutcome>,
    pub reserve: Vec<Vertex>,
    pub prefix: Prefix,
}

impl FullOutcome {
    pub fn coverage(&self) -> f64 {
        self.packing.coverage_fraction()
    }

    pub fn invariants_ok(&self) -> bool {
        self.core.as_ref().map_or(true, |c| c.stats.invariants_ok)
    }
}

/// Packs subdivisions of any pattern, padding for isolated vertices.
pub fn pack_full(g: &HostGraph, pattern: &Arc<PatternGraph>, cfg: &PackerConfig, eta: f64) -> Result<FullOutcome, PackerError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(PackerError::InvalidConfig(format!("eta = {eta} must lie in [0, 1]")));
    }
    let n = g.n();
    let iso = pattern.isolated_count();
    if pattern.edge_count() == 0 {
        let order = pattern.order();
        let groups = if order == 0 { 0 } else { n / order };
        let mut packing = Packing::new(n);
        for i in 0..groups {
            packing.witnesses.push(SubdivisionWitness {
                pattern: Arc::clone(pattern),
                branch_map: Vec::new(),
                subdiv_paths: Vec::new(),
                iso_vertices: (i * order..(i + 1) * order).collect(),
            });
        }
        let prefix = select_prefix(&vec![0; groups], order, n, eta);
        return Ok(FullOutcome { packing, core: None, reserve: Vec::new(), prefix });
    }
    if iso == 0 {
        let core = pack_core(g, pattern, cfg)?;
        let sizes: Vec<usize> = core.packing.witnesses.iter().map(SubdivisionWitness::size).collect();
        let mut sorted = sizes.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let mut prefix = select_prefix(&sorted, 0, n, eta);
        prefix.keep = sizes.len();
        return Ok(FullOutcome { packing: core.packing.clone(), core: Some(core), reserve: Vec::new(), prefix });
    }

    let reserve_size = ((cfg.gamma * g.average_degree()).floor() as usize).min(n);
    let reserve: Vec<Vertex> = (0..reserve_size).collect();
    let rest: Vec<Vertex> = (reserve_size..n).collect();
    let (sub, map) = g.induced_subgraph(&rest);
    let core_pattern = Arc::new(pattern.core_pattern());
    let mut core = pack_core(&sub, &core_pattern, cfg)?;
    let lift = |v: Vertex| map[v];
    for w in &mut core.packing.witnesses {
        *w = relabel(w, &map);
    }
    core.packing.n = n;
    core.w = core.w.iter().map(|&v| lift(v)).collect();
    core.paths = core.paths.iter().map(|p| p.iter().map(|&v| lift(v)).collect()).collect();

    let mut order: Vec<usize> = (0..core.packing.witnesses.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(core.packing.witnesses[i].size()));
    let sizes: Vec<usize> = order.iter().map(|&i| core.packing.witnesses[i].size()).collect();
    let prefix = select_prefix(&sizes, iso, n, eta);
    let kept: Vec<usize> = order[..prefix.keep].to_vec();

    let mut taken = vec![false; n];
    for &i in &kept {
        core.packing.witnesses[i].vertices().into_iter().for_each(|v| taken[v] = true);
    }
    let mut on_path = vec![false; n];
    core.paths.iter().flatten().for_each(|&v| on_path[v] = true);
    let mut in_w = vec![false; n];
    core.w.iter().for_each(|&v| in_w[v] = true);
    // spare vertices: the reserve, then large-side vertices off every path, then the rest
    let mut spares: Vec<Vertex> = reserve.clone();
    spares.extend((reserve_size..n).filter(|&v| !taken[v] && !on_path[v] && !in_w[v]));
    spares.extend((reserve_size..n).filter(|&v| !taken[v] && (on_path[v] || in_w[v])));
    let mut spares = spares.into_iter();

    let mut packing = Packing::new(n);
    for &i in &kept {
        let mut w = core.packing.witnesses[i].clone();
        w.pattern = Arc::clone(pattern);
        w.iso_vertices = spares.by_ref().take(iso).collect();
        if w.iso_vertices.len() < iso {
            break;
        }
        packing.witnesses.push(w);
    }
    Ok(FullOutcome { packing, core: Some(core), reserve, prefix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_named, gen_random_regular};
    use crate::witness::validate_packing;

    fn pat(id: &str) -> Arc<PatternGraph> {
        Arc::new(PatternGraph::from_id(id).unwrap())
    }

    #[test]
    fn prefix_worked_example() {
        let p = select_prefix(&[10, 8, 6], 1, 30, 0.3);
        assert_eq!(p.z, vec![11, 20, 27]);
        assert_eq!(p.keep, 3);
        assert!(p.target_met);
        let p = select_prefix(&[10, 8, 6], 2, 30, 0.3);
        assert_eq!(p.z, vec![12, 22, 30]);
        assert_eq!(p.keep, 2);
        assert!(p.target_met);
    }

    #[test]
    fn prefix_fallbacks() {
        // target unreachable: keep everything that fits
        let p = select_prefix(&[4, 3], 1, 30, 0.1);
        assert_eq!((p.keep, p.target_met), (2, false));
        // first index reaching the target overshoots n
        let p = select_prefix(&[20, 15], 0, 30, 0.1);
        assert_eq!((p.keep, p.target_met), (1, false));
        assert_eq!(select_prefix(&[], 1, 10, 0.5).keep, 0);
    }

    #[test]
    fn config_validation() {
        assert!(PackerConfig::default().validate().is_ok());
        for bad in [
            PackerConfig { p: 0.5, ..PackerConfig::default() },
            PackerConfig { m: 1, ..PackerConfig::default() },
            PackerConfig { epsilon: 0.0, ..PackerConfig::default() },
            PackerConfig { gamma: 0.7, ..PackerConfig::default() },
            PackerConfig { u_prime_fraction: Some(1.5), ..PackerConfig::default() },
        ] {
            assert!(matches!(bad.validate(), Err(PackerError::InvalidConfig(_))));
        }
        let c = PackerConfig { u_prime_fraction: None, p: 0.2, epsilon: 0.1, ..PackerConfig::default() };
        assert!((c.p1() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn aux_graph_single_forced_edge() {
        // path 0-1-2 with x = 0, y = 2; W = {3, 4}; 3 ~ 0 and 4 ~ 2
        let g = HostGraph::from_edges(5, &[(0, 1), (1, 2), (0, 3), (2, 4)]).unwrap();
        let paths = vec![vec![0, 1, 2]];
        let aux = build_aux(&g, &[3, 4], &[0], &paths);
        assert_eq!(aux.graph.edge_list(), vec![(0, 1)]);
        assert_eq!(aux.labels[&(0, 1)], EdgeLabel { path: 0, x_end: 0 });
        assert!(aux_is_maximal(&g, &aux, &[0], &paths));
        let empty = build_aux(&g, &[3, 4], &[], &paths);
        assert_eq!(empty.graph.m(), 0);
    }

    #[test]
    fn aux_graph_shared_pair_goes_to_one_path() {
        // paths 0-1 and 2-3; every endpoint sees both 4 and 5
        let mut edges = vec![(0, 1), (2, 3)];
        for e in 0..4 {
            edges.push((e, 4));
            edges.push((e, 5));
        }
        let g = HostGraph::from_edges(6, &edges).unwrap();
        let paths = vec![vec![0, 1], vec![2, 3]];
        let aux = build_aux(&g, &[4, 5], &[0, 1], &paths);
        assert_eq!(aux.graph.m(), 1);
        assert_eq!(aux.labels[&(0, 1)].path, 0);
        assert!(aux_is_maximal(&g, &aux, &[0, 1], &paths));
    }

    #[test]
    fn expansion_of_a_triangle() {
        // auxiliary triangle on W = {15, 16, 17}, three 5-vertex paths
        let paths: Vec<Vec<usize>> = (0..3).map(|j| (5 * j..5 * j + 5).collect()).collect();
        let mut edges = Vec::new();
        for p in &paths {
            edges.extend(p.windows(2).map(|w| (w[0], w[1])));
        }
        // edge {15,16} via path 0, {16,17} via path 1, {15,17} via path 2
        edges.extend([(15, 0), (4, 16), (16, 5), (9, 17), (15, 10), (14, 17)]);
        let g = HostGraph::from_edges(18, &edges).unwrap();
        let aux = build_aux(&g, &[15, 16, 17], &[0, 1, 2], &paths);
        assert_eq!(aux.graph.m(), 3);
        let tri = find_subdivision(&aux.graph, &pat("C3"), FinderBudget::exhaustive(1000)).unwrap().witness().unwrap();
        let w = expand_witness(&tri, &aux, &paths).unwrap();
        assert!(validate_witness(&g, &w).is_valid());
        assert_eq!(w.size(), 18);
        let packing = Packing { n: 18, witnesses: vec![w] };
        assert!(family_violations(18, &packing, &[15, 16, 17], &paths, 5).is_empty());
    }

    #[test]
    fn missing_label_is_reported() {
        let g = HostGraph::from_edges(2, &[(0, 1)]).unwrap();
        let aux = AuxiliaryGraph { vertices: vec![0, 1], graph: g.clone(), labels: HashMap::new() };
        let w = find_subdivision(&g, &pat("P2"), FinderBudget::exhaustive(10)).unwrap().witness().unwrap();
        assert_eq!(expand_witness(&w, &aux, &[]).unwrap_err(), PackerError::LabelMissing((0, 1)));
    }

    #[test]
    fn cycle_host_gives_empty_k4_packing() {
        let g = gen_named("C30").unwrap();
        let cfg = PackerConfig { gamma: 0.5, ..PackerConfig::default() };
        let out = pack_core(&g, &pat("K4"), &cfg).unwrap();
        assert!(out.packing.witnesses.is_empty());
        assert!(out.stats.invariants_ok);
    }

    #[test]
    fn disjoint_cliques_with_triangles() {
        let mut edges = Vec::new();
        for c in 0..10 {
            for i in 0..12 {
                for j in i + 1..12 {
                    edges.push((12 * c + i, 12 * c + j));
                }
            }
        }
        let g = HostGraph::from_edges(120, &edges).unwrap();
        let cfg =
            PackerConfig { p: 0.3, m: 2, gamma: 0.5, epsilon: 0.5, u_prime_fraction: Some(1.0), ..PackerConfig::default() };
        let out = pack_core(&g, &pat("C3"), &cfg).unwrap();
        let report = validate_packing(&g, &out.packing);
        assert!(report.valid, "{:?}", report.reasons);
        assert!(out.stats.invariants_ok, "{:?}", out.stats.invariant_failures);
        assert!(family_violations(120, &out.packing, &out.w, &out.paths, 2).is_empty());
        assert!(!out.packing.witnesses.is_empty());
    }

    #[test]
    fn random_regular_run_is_valid_and_deterministic() {
        let g = gen_random_regular(600, 24, 3).unwrap();
        let cfg = PackerConfig { seed: 9, ..PackerConfig::default() };
        let a = pack_core(&g, &pat("C4"), &cfg).unwrap();
        let b = pack_core(&g, &pat("C4"), &cfg).unwrap();
        assert_eq!(a.packing, b.packing);
        assert!(validate_packing(&g, &a.packing).valid);
        assert!(a.stats.invariants_ok, "{:?}", a.stats.invariant_failures);
        assert!(family_violations(600, &a.packing, &a.w, &a.paths, cfg.m).is_empty());
        let mean = (0..4u64)
            .map(|s| {
                let g = gen_random_regular(600, 24, s).unwrap();
                let cfg = PackerConfig { seed: s, ..PackerConfig::default() };
                pack_core(&g, &pat("C4"), &cfg).unwrap().packing.coverage_fraction()
            })
            .sum::<f64>()
            / 4.0;
        assert!(mean > 0.3, "mean coverage {mean}");
    }

    #[test]
    fn full_packing_with_an_isolated_vertex() {
        let g = gen_random_regular(400, 32, 5).unwrap();
        let out = pack_full(&g, &pat("P2+iso"), &PackerConfig::default(), 0.1).unwrap();
        assert!(validate_packing(&g, &out.packing).valid);
        assert!(out.packing.witnesses.iter().all(|w| w.iso_vertices.len() == 1));
        assert_eq!(out.reserve.len(), (0.35f64 * 32.0).floor() as usize);
    }

    #[test]
    fn isolated_free_full_equals_core() {
        let g = gen_random_regular(300, 16, 2).unwrap();
        let cfg = PackerConfig::default();
        let full = pack_full(&g, &pat("C3"), &cfg, 0.1).unwrap();
        let core = pack_core(&g, &pat("C3"), &cfg).unwrap();
        assert_eq!(full.packing, core.packing);
        assert!(full.reserve.is_empty());
    }

    #[test]
    fn edgeless_pattern_groups_vertices() {
        let g = gen_named("C7").unwrap();
        let p = Arc::new(PatternGraph::new("2K1", HostGraph::empty(2)));
        let out = pack_full(&g, &p, &PackerConfig::default(), 0.1).unwrap();
        assert_eq!(out.packing.witnesses.len(), 3);
        assert!(validate_packing(&g, &out.packing).valid);
    }
}
