//! Seeded instance generators: random regular graphs, the regular
//! lower-bound gadget with two uncoverable apex vertices, and a small catalog
//! of named graphs.

use std::collections::HashMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{HostGraph, Vertex};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("no simple {d}-regular graph on {n} vertices (need n*d even and d < n)")]
    InfeasibleDegreeSequence { n: usize, d: usize },
    #[error("random regular generation gave up after {swaps} repair swaps")]
    GenerationTimeout { swaps: u64 },
    #[error("gadget degree {0} must be even and at least 4")]
    InvalidDegree(usize),
    #[error("unknown named graph `{0}`")]
    UnknownName(String),
    #[error("instance kind `{0}` needs field `{1}`")]
    MissingField(&'static str, &'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    RandomRegular,
    Gadget,
    Named,
}

/// Parameters for one generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    #[serde(default)]
    pub n: usize,
    #[serde(default)]
    pub d: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub name: Option<String>,
}

impl GenSpec {
    pub fn random_regular(n: usize, d: usize, seed: u64) -> Self {
        Self {
            kind: GenKind::RandomRegular,
            n,
            d,
            seed,
            name: None,
        }
    }

    pub fn generate(&self) -> Result<HostGraph, GenError> {
        match self.kind {
            GenKind::RandomRegular => gen_random_regular(self.n, self.d, self.seed),
            GenKind::Gadget => gen_lower_bound_gadget(self.d).map(|g| g.graph),
            GenKind::Named => gen_named(
                self.name
                    .as_deref()
                    .ok_or(GenError::MissingField("named", "name"))?,
            ),
        }
    }
}

/// Expected-acceptance cutoff for whole-pairing rejection: below this the
/// retry budget would be spent without success, so repair starts at once.
const MIN_ACCEPTANCE: f64 = 1e-6;

/// Configuration-model random `d`-regular graph. Whole pairings are retried
/// (aborting at the first loop or repeated edge) within a budget of
/// `100·n·d` paired half-edges; afterwards one pairing is repaired by random
/// double-edge swaps. Deterministic in `seed`.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<HostGraph, GenError> {
    if (n * d) % 2 == 1 || (d >= n && !(n == 0 && d == 0)) {
        return Err(GenError::InfeasibleDegreeSequence { n, d });
    }
    let mut rng = rng::stream(seed, 0x7265_6775_6c61_72);
    if n > 0 && 2 * d > n - 1 {
        // dense: the complement is sparser and just as uniform
        let sparse = sample_regular(n, n - 1 - d, &mut rng)?;
        let mut adj = vec![Vec::with_capacity(d); n];
        for (u, row) in adj.iter_mut().enumerate() {
            let mut others = sparse.neighbors(u).iter().peekable();
            for v in 0..n {
                if others.peek() == Some(&&v) {
                    others.next();
                } else if v != u {
                    row.push(v);
                }
            }
        }
        let g = HostGraph::from_adjacency(adj);
        debug_assert!(g.is_regular(d));
        return Ok(g);
    }
    sample_regular(n, d, &mut rng)
}

fn sample_regular(n: usize, d: usize, rng: &mut rng::Rng) -> Result<HostGraph, GenError> {
    let stubs = n * d;
    let acceptance = (-((d * d) as f64 - 1.0) / 4.0).exp();
    if acceptance >= MIN_ACCEPTANCE {
        let budget = 100 * stubs as u64;
        let mut spent = 0u64;
        let mut pool: Vec<Vertex> = Vec::with_capacity(stubs);
        let mut seen = std::collections::HashSet::new();
        while spent < budget {
            pool.clear();
            pool.extend((0..stubs).map(|s| s / d.max(1)));
            seen.clear();
            let mut edges = Vec::with_capacity(stubs / 2);
            let mut ok = true;
            for i in (0..stubs).step_by(2) {
                let j = rng.gen_range(i..stubs);
                pool.swap(i, j);
                let k = rng.gen_range(i + 1..stubs);
                pool.swap(i + 1, k);
                spent += 2;
                let (u, v) = (pool[i].min(pool[i + 1]), pool[i].max(pool[i + 1]));
                if u == v || !seen.insert((u, v)) {
                    ok = false;
                    break;
                }
                edges.push((u, v));
            }
            if ok {
                return Ok(finish_regular(n, d, &edges));
            }
        }
    }
    repair_pairing(n, d, rng)
}

fn repair_pairing(n: usize, d: usize, rng: &mut rng::Rng) -> Result<HostGraph, GenError> {
    use rand::seq::SliceRandom;
    let stubs = n * d;
    let max_swaps = 1000 * stubs.max(1) as u64;
    // a stuck repair starts over from a fresh pairing
    let restart_every = 100 * stubs.max(1) as u64;
    let mut swaps = 0u64;
    'restart: loop {
        let mut pool: Vec<Vertex> = (0..stubs).map(|s| s / d.max(1)).collect();
        pool.shuffle(rng);
        let mut edges: Vec<(Vertex, Vertex)> = pool
            .chunks(2)
            .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
            .collect();
        let mut count: HashMap<(Vertex, Vertex), u32> = HashMap::with_capacity(edges.len());
        for &e in &edges {
            *count.entry(e).or_insert(0) += 1;
        }
        let is_bad = |e: (Vertex, Vertex), count: &HashMap<(Vertex, Vertex), u32>| {
            e.0 == e.1 || count[&e] > 1
        };
        let mut local = 0u64;
        loop {
            let mut clean = true;
            for b in 0..edges.len() {
                while is_bad(edges[b], &count) {
                    clean = false;
                    swaps += 1;
                    local += 1;
                    if swaps > max_swaps {
                        return Err(GenError::GenerationTimeout { swaps });
                    }
                    if local > restart_every {
                        continue 'restart;
                    }
                    let o = rng.gen_range(0..edges.len());
                    if o == b {
                        continue;
                    }
                    let (u, v) = edges[b];
                    let (x, y) = edges[o];
                    let (a1, a2) = if rng.gen_bool(0.5) {
                        ((u, x), (v, y))
                    } else {
                        ((u, y), (v, x))
                    };
                    let e1 = (a1.0.min(a1.1), a1.0.max(a1.1));
                    let e2 = (a2.0.min(a2.1), a2.0.max(a2.1));
                    if e1.0 == e1.1 || e2.0 == e2.1 || e1 == e2 {
                        continue;
                    }
                    if count.get(&e1).copied().unwrap_or(0) > 0
                        || count.get(&e2).copied().unwrap_or(0) > 0
                    {
                        continue;
                    }
                    for old in [edges[b], edges[o]] {
                        *count.get_mut(&old).unwrap() -= 1;
                    }
                    *count.entry(e1).or_insert(0) += 1;
                    *count.entry(e2).or_insert(0) += 1;
                    edges[b] = e1;
                    edges[o] = e2;
                }
            }
            if clean {
                return Ok(finish_regular(n, d, &edges));
            }
        }
    }
}

fn finish_regular(n: usize, d: usize, edges: &[(Vertex, Vertex)]) -> HostGraph {
    let mut adj = vec![Vec::with_capacity(d); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let g = HostGraph::from_adjacency(adj);
    debug_assert!(g.is_regular(d), "generator produced a non-regular graph");
    debug_assert!(
        HostGraph::from_edges(n, edges).is_ok(),
        "generator produced a multigraph"
    );
    g
}

/// How each gadget block is carved out of `K_{d+2}` before the x,y,z swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockVariant {
    /// Remove a perfect matching; the result is `d`-regular.
    #[default]
    PerfectMatching,
    /// Remove a Hamilton cycle, read literally. Block vertices other than y
    /// end up with degree `d - 1`, so the gadget is not regular.
    HamiltonCycle,
}

#[derive(Debug, Clone)]
pub struct Gadget {
    pub graph: HostGraph,
    pub u: Vertex,
    pub v: Vertex,
    /// The low-degree vertex of each block, adjacent to both apexes.
    pub ys: Vec<Vertex>,
}

/// `d` blocks of `d + 2` vertices plus apexes `u`, `v` joined to every
/// block's low-degree vertex; `d(d+2)+2` vertices, `d`-regular.
pub fn gen_lower_bound_gadget(d: usize) -> Result<Gadget, GenError> {
    gen_lower_bound_gadget_with(d, BlockVariant::PerfectMatching)
}

pub fn gen_lower_bound_gadget_with(d: usize, variant: BlockVariant) -> Result<Gadget, GenError> {
    if d < 4 || (variant == BlockVariant::PerfectMatching && d % 2 == 1) {
        return Err(GenError::InvalidDegree(d));
    }
    let b = d + 2;
    let mut block = vec![vec![true; b]; b];
    for (i, row) in block.iter_mut().enumerate() {
        row[i] = false;
    }
    let mut drop = |x: usize, y: usize| {
        block[x][y] = false;
        block[y][x] = false;
    };
    match variant {
        BlockVariant::PerfectMatching => (0..b).step_by(2).for_each(|i| drop(i, i + 1)),
        BlockVariant::HamiltonCycle => (0..b).for_each(|i| drop(i, (i + 1) % b)),
    }
    // lexicographically first (x, y, z) with xy, yz present and xz absent
    let (x, y, z) = (0..b)
        .flat_map(|x| (0..b).flat_map(move |y| (0..b).map(move |z| (x, y, z))))
        .find(|&(x, y, z)| x != y && y != z && x != z && block[x][y] && block[y][z] && !block[x][z])
        .expect("block always has such a triple for d >= 4");
    block[x][y] = false;
    block[y][x] = false;
    block[y][z] = false;
    block[z][y] = false;
    block[x][z] = true;
    block[z][x] = true;

    let n = d * b + 2;
    let (u, v) = (d * b, d * b + 1);
    let mut edges = Vec::new();
    let mut ys = Vec::with_capacity(d);
    for copy in 0..d {
        let off = copy * b;
        for i in 0..b {
            for j in i + 1..b {
                if block[i][j] {
                    edges.push((off + i, off + j));
                }
            }
        }
        ys.push(off + y);
        edges.push((u, off + y));
        edges.push((v, off + y));
    }
    let graph = HostGraph::from_edges(n, &edges).expect("gadget construction is simple");
    Ok(Gadget { graph, u, v, ys })
}

/// Catalog: `K<t>`, `C<k>` (k ≥ 3), `P<k>` (path on k vertices),
/// `K<a>,<b>` or two-digit `K<a><b>` with `2 ≤ a ≤ b ≤ 9` (complete
/// bipartite), `K4-e`, `petersen`.
pub fn gen_named(id: &str) -> Result<HostGraph, GenError> {
    let unknown = || GenError::UnknownName(id.to_string());
    let num = |s: &str| s.parse::<usize>().map_err(|_| unknown());
    let edges: Vec<(usize, usize)>;
    let n: usize;
    if id.eq_ignore_ascii_case("petersen") {
        n = 10;
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        edges = e;
    } else if id == "K4-e" {
        n = 4;
        edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)];
    } else if let Some(rest) = id.strip_prefix('K') {
        let bip = if let Some((a, b)) = rest.split_once(',') {
            Some((num(a)?, num(b)?))
        } else {
            let digits: Vec<usize> = rest
                .chars()
                .filter_map(|c| c.to_digit(10).map(|x| x as usize))
                .collect();
            (rest.len() == 2 && digits.len() == 2 && 2 <= digits[0] && digits[0] <= digits[1])
                .then(|| (digits[0], digits[1]))
        };
        match bip {
            Some((a, b)) => {
                n = a + b;
                edges = (0..a)
                    .flat_map(|i| (a..a + b).map(move |j| (i, j)))
                    .collect();
            }
            None => {
                n = num(rest)?;
                edges = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .collect();
            }
        }
    } else if let Some(rest) = id.strip_prefix('C') {
        n = num(rest)?;
        if n < 3 {
            return Err(unknown());
        }
        edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
    } else if let Some(rest) = id.strip_prefix('P') {
        n = num(rest)?;
        if n == 0 {
            return Err(unknown());
        }
        edges = (0..n - 1).map(|i| (i, i + 1)).collect();
    } else {
        return Err(unknown());
    }
    Ok(HostGraph::from_edges(n, &edges).expect("catalog graphs are simple"))
}
