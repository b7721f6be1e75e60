//! Vertex-disjoint paths on exactly `m` vertices covering most of a vertex
//! set, built from maximum matchings between consecutive parts of a
//! balanced `m`-partition.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{HostGraph, Vertex};
use crate::matching::hopcroft_karp;
use crate::partition::{partition, PartitionRequest};

const FREE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathCoverParams {
    /// Vertices per path; at least 2.
    pub m: usize,
    /// Reference degree of the vertices into the covered set.
    pub d: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathCoverError {
    #[error("invalid path cover parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathCoverStats {
    pub covered: usize,
    /// Maximal chains that stop short of `m` vertices.
    pub fragments: usize,
    /// Required number of paths, `ceil((1 - ε)|V| / m)`.
    pub target: usize,
    pub shortfall: usize,
    pub partition_ok: bool,
    pub partition_rounds: usize,
    /// Host vertices whose degree into the set lies outside `(1 ± γ) d`.
    pub untracked: usize,
    pub matching_sizes: Vec<usize>,
    /// `e(H_i) / Δ(H_i)` for each consecutive pair of parts.
    pub matching_lower_bounds: Vec<f64>,
    pub endvertex_max_degree: usize,
    pub endvertex_degree_bound: f64,
}

impl PathCoverStats {
    pub fn endvertex_bound_ok(&self) -> bool {
        self.endvertex_max_degree as f64 <= self.endvertex_degree_bound + 1e-9
    }

    pub fn matchings_ok(&self) -> bool {
        self.matching_sizes.iter().zip(&self.matching_lower_bounds).all(|(&s, &b)| s as f64 + 1e-9 >= b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathCover {
    /// Each path lists one vertex per part, in part order.
    pub paths: Vec<Vec<Vertex>>,
    pub m: usize,
    /// The partition the paths were threaded through, one class per position.
    pub classes: Vec<Vec<Vertex>>,
    pub stats: PathCoverStats,
}

impl PathCover {
    /// `(first, last)` vertex of every path.
    pub fn endvertices(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.paths.iter().map(|p| (p[0], p[p.len() - 1]))
    }
}

pub fn build_path_cover(g: &HostGraph, set: &[Vertex], params: PathCoverParams) -> Result<PathCover, PathCoverError> {
    let PathCoverParams { m, d, gamma, epsilon, seed } = params;
    if m < 2 {
        return Err(PathCoverError::InvalidParams(format!("m = {m} must be at least 2")));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(PathCoverError::InvalidParams(format!("epsilon = {epsilon} outside [0, 1]")));
    }
    let n = g.n();
    let mut in_set = vec![false; n];
    for &v in set {
        in_set[v] = true;
    }
    // every host vertex counts, so small-side vertices also see few endvertices
    let tracked: Vec<Vertex> = (0..n)
        .filter(|&v| {
            let deg = g.degree_into(v, &in_set) as f64;
            deg >= (1.0 - gamma) * d - 1e-9 && deg <= (1.0 + gamma) * d + 1e-9
        })
        .collect();
    let req = PartitionRequest::new(g, set, &tracked, vec![1.0 / m as f64; m], gamma, d)
        .with_upper_bounds(true)
        .with_size_gamma(gamma.min(epsilon / 4.0));
    let (classes, partition_ok, partition_rounds) = match partition(&req, seed) {
        Ok(r) => (r.classes, true, r.resample_rounds),
        Err(e) => match e.best_effort() {
            Some(b) => (b.classes.clone(), false, b.resample_rounds),
            None => return Err(PathCoverError::InvalidParams(e.to_string())),
        },
    };

    let mut index = vec![FREE; n];
    for class in &classes {
        for (i, &v) in class.iter().enumerate() {
            index[v] = i;
        }
    }
    let mut class_of = vec![FREE; n];
    for (c, class) in classes.iter().enumerate() {
        for &v in class {
            class_of[v] = c;
        }
    }

    let mut matchings: Vec<Vec<usize>> = Vec::with_capacity(m - 1);
    let mut lower_bounds = Vec::with_capacity(m - 1);
    for i in 0..m - 1 {
        let adj: Vec<Vec<usize>> = classes[i]
            .iter()
            .map(|&v| g.neighbors(v).iter().filter(|&&w| class_of[w] == i + 1).map(|&w| index[w]).collect())
            .collect();
        let edges: usize = adj.iter().map(Vec::len).sum();
        let mut right_deg = vec![0usize; classes[i + 1].len()];
        adj.iter().flatten().for_each(|&r| right_deg[r] += 1);
        let max_deg = adj.iter().map(Vec::len).chain(right_deg.iter().copied()).max().unwrap_or(0);
        lower_bounds.push(if max_deg == 0 { 0.0 } else { edges as f64 / max_deg as f64 });

        let mate = if i == 0 {
            hopcroft_karp(&adj, classes[1].len(), None)
        } else {
            // heads first, so chains arriving in part i keep going
            let prev = &matchings[i - 1];
            let mut is_head = vec![false; classes[i].len()];
            prev.iter().filter(|&&r| r != FREE).for_each(|&r| is_head[r] = true);
            let head_adj: Vec<Vec<usize>> =
                adj.iter().enumerate().map(|(l, a)| if is_head[l] { a.clone() } else { Vec::new() }).collect();
            let first = hopcroft_karp(&head_adj, classes[i + 1].len(), None);
            hopcroft_karp(&adj, classes[i + 1].len(), Some(&first))
        };
        matchings.push(mate);
    }

    let (paths, fragments) = assemble_paths(&matchings, &classes);
    let covered = paths.len() * m;
    let target = ((1.0 - epsilon) * set.len() as f64 / m as f64).ceil().max(0.0) as usize;

    let mut is_end = vec![false; n];
    for p in &paths {
        is_end[p[0]] = true;
        is_end[p[m - 1]] = true;
    }
    let endvertex_max_degree = (0..n).map(|v| g.degree_into(v, &is_end)).max().unwrap_or(0);

    Ok(PathCover {
        m,
        classes,
        stats: PathCoverStats {
            covered,
            fragments,
            target,
            shortfall: target.saturating_sub(paths.len()),
            partition_ok,
            partition_rounds,
            untracked: n - tracked.len(),
            matching_sizes: matchings.iter().map(|mt| mt.iter().filter(|&&r| r != FREE).count()).collect(),
            matching_lower_bounds: lower_bounds,
            endvertex_max_degree,
            endvertex_degree_bound: 4.0 * d / m as f64,
        },
        paths,
    })
}

/// Follows the matchings from part 0 onward. `matchings[i][a] = b` pairs the
/// `a`-th vertex of part `i` with the `b`-th vertex of part `i + 1`. Returns
/// full paths and the number of shorter maximal chains (of 2+ vertices).
pub fn assemble_paths(matchings: &[Vec<usize>], classes: &[Vec<Vertex>]) -> (Vec<Vec<Vertex>>, usize) {
    let m = classes.len();
    let mut has_pred: Vec<Vec<bool>> = classes.iter().map(|c| vec![false; c.len()]).collect();
    for (i, mt) in matchings.iter().enumerate() {
        for &r in mt.iter().filter(|&&r| r != FREE) {
            has_pred[i + 1][r] = true;
        }
    }
    let mut paths = Vec::new();
    let mut fragments = 0;
    for start in 0..m {
        for a in 0..classes[start].len() {
            if has_pred[start][a] {
                continue;
            }
            let mut chain = vec![classes[start][a]];
            let (mut part, mut idx) = (start, a);
            while part + 1 < m && matchings[part][idx] != FREE {
                idx = matchings[part][idx];
                part += 1;
                chain.push(classes[part][idx]);
            }
            if chain.len() == m {
                paths.push(chain);
            } else if chain.len() >= 2 {
                fragments += 1;
            }
        }
    }
    (paths, fragments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_named, gen_random_regular};
    use proptest::prelude::*;

    fn check_paths(g: &HostGraph, set: &[Vertex], cover: &PathCover) {
        let mut seen = vec![false; g.n()];
        let in_set: Vec<bool> = (0..g.n()).map(|v| set.contains(&v)).collect();
        for p in &cover.paths {
            assert_eq!(p.len(), cover.m);
            for w in p.windows(2) {
                assert!(g.has_edge(w[0], w[1]));
            }
            for &v in p {
                assert!(in_set[v] && !seen[v]);
                seen[v] = true;
            }
        }
    }

    #[test]
    fn assemble_simple_chains() {
        let classes = vec![vec![0, 1], vec![2, 3], vec![4, 5]];
        let matchings = vec![vec![0, FREE], vec![FREE, 1]];
        let (paths, fragments) = assemble_paths(&matchings, &classes);
        assert!(paths.is_empty());
        // 0-2 and 3-5
        assert_eq!(fragments, 2);
        let matchings = vec![vec![1, 0], vec![1, 0]];
        let (paths, _) = assemble_paths(&matchings, &classes);
        assert_eq!(paths, vec![vec![0, 3, 4], vec![1, 2, 5]]);
    }

    #[test]
    fn complete_graph_is_fully_covered() {
        let g = gen_named("K64").unwrap();
        let set: Vec<usize> = (0..64).collect();
        let params = PathCoverParams { m: 4, d: 63.0, gamma: 0.3, epsilon: 0.2, seed: 1 };
        let cover = build_path_cover(&g, &set, params).unwrap();
        check_paths(&g, &set, &cover);
        // smallest part bounds the number of paths
        assert!(cover.stats.partition_ok);
        assert_eq!(cover.stats.shortfall, 0);
        assert!(cover.stats.matchings_ok());
    }

    #[test]
    fn random_regular_meets_target() {
        let g = gen_random_regular(1000, 32, 3).unwrap();
        let set: Vec<usize> = (0..1000).collect();
        let params = PathCoverParams { m: 4, d: 32.0, gamma: 0.35, epsilon: 0.2, seed: 5 };
        let cover = build_path_cover(&g, &set, params).unwrap();
        check_paths(&g, &set, &cover);
        assert!(cover.stats.matchings_ok());
        assert_eq!(cover.stats.shortfall, 0, "{:?}", cover.stats);
        assert!(cover.stats.endvertex_bound_ok());
    }

    #[test]
    fn rejects_tiny_m() {
        let g = gen_named("K4").unwrap();
        let p = PathCoverParams { m: 1, d: 3.0, gamma: 0.2, epsilon: 0.1, seed: 0 };
        assert!(build_path_cover(&g, &[0, 1, 2, 3], p).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn paths_are_disjoint_and_proper(n in 20usize..80, d in 3usize..8, m in 2usize..6, seed in any::<u64>()) {
            let n = n + (n * d) % 2;
            let g = gen_random_regular(n, d, seed).unwrap();
            let set: Vec<usize> = (0..n).filter(|v| v % 5 != 0).collect();
            let params = PathCoverParams { m, d: d as f64 * 0.8, gamma: 0.5, epsilon: 0.5, seed };
            let cover = build_path_cover(&g, &set, params).unwrap();
            check_paths(&g, &set, &cover);
            prop_assert!(cover.stats.matchings_ok());
            prop_assert_eq!(cover.stats.covered, cover.paths.len() * m);
        }
    }
}
