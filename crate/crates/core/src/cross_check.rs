//! Compares the finder and the packer against the exhaustive oracle on a
//! tiny host graph.

use std::sync::Arc;

use serde::Serialize;

use crate::finder::{find_subdivision, FindOutcome, FinderBudget};
use crate::graph::HostGraph;
use crate::oracle::{enumerate_subdivisions, optimal_packing, subdivision_exists, OracleError, OracleLimits};
use crate::packer::{pack_full, PackerConfig};
use crate::pattern::PatternGraph;
use crate::witness::{validate_packing, SubdivisionWitness};

const FINDER_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckReport {
    pub n: usize,
    pub pattern: String,
    pub oracle_exists: bool,
    /// `None` when the exhaustive finder ran out of budget.
    pub finder_found: Option<bool>,
    pub oracle_covered: usize,
    pub packer_covered: usize,
    pub packer_error: Option<String>,
    pub packer_valid: bool,
    /// Packer witnesses whose vertex and edge set is not an enumerable
    /// subdivision of the host.
    pub foreign_witnesses: usize,
}

impl CrossCheckReport {
    pub fn finder_agrees(&self) -> bool {
        self.finder_found == Some(self.oracle_exists)
    }

    pub fn packer_within_optimum(&self) -> bool {
        self.packer_covered <= self.oracle_covered
    }

    pub fn witnesses_enumerable(&self) -> bool {
        self.packer_valid && self.foreign_witnesses == 0
    }

    pub fn all_ok(&self) -> bool {
        self.finder_agrees() && self.packer_within_optimum() && self.witnesses_enumerable()
    }
}

fn key(w: &SubdivisionWitness) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut v = w.core_vertices();
    v.sort_unstable();
    (v, w.edge_set())
}

/// Whether `w` (core part) is one of the subdivisions the oracle enumerates
/// inside the subgraph formed by its own edges.
fn enumerable(n: usize, w: &SubdivisionWitness, limits: &OracleLimits) -> Result<bool, OracleError> {
    let core = Arc::new(w.pattern.core_pattern());
    let edges = w.edge_set();
    let Ok(sub) = HostGraph::from_edges(n, &edges) else {
        return Ok(false);
    };
    let target = key(w);
    Ok(enumerate_subdivisions(&sub, &core, limits)?.iter().any(|e| key(e) == target))
}

/// Runs the finder (exhaustive), the oracle and the full packer on `g`.
pub fn cross_check(
    g: &HostGraph,
    pattern: &Arc<PatternGraph>,
    cfg: &PackerConfig,
    limits: &OracleLimits,
) -> Result<CrossCheckReport, OracleError> {
    let core = Arc::new(pattern.core_pattern());
    let oracle_exists = core.edge_count() == 0 || subdivision_exists(g, &core, limits)?;
    let finder_found = if core.edge_count() == 0 {
        Some(true)
    } else {
        match find_subdivision(g, &core, FinderBudget::exhaustive(FINDER_BUDGET)) {
            Ok(FindOutcome::Found(_)) => Some(true),
            Ok(FindOutcome::NotFound { .. }) => Some(false),
            Err(_) => None,
        }
    };
    let optimum = optimal_packing(g, pattern, limits)?;

    let mut report = CrossCheckReport {
        n: g.n(),
        pattern: pattern.name().to_string(),
        oracle_exists,
        finder_found,
        oracle_covered: optimum.covered,
        packer_covered: 0,
        packer_error: None,
        packer_valid: true,
        foreign_witnesses: 0,
    };
    match pack_full(g, pattern, cfg, 0.0) {
        Ok(out) => {
            let check = validate_packing(g, &out.packing);
            report.packer_valid = check.valid;
            report.packer_covered = check.covered;
            for w in out.packing.witnesses.iter().filter(|w| !w.subdiv_paths.is_empty()) {
                if !enumerable(g.n(), w, limits)? {
                    report.foreign_witnesses += 1;
                }
            }
        }
        Err(e) => report.packer_error = Some(e.to_string()),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_named;

    fn pat(id: &str) -> Arc<PatternGraph> {
        Arc::new(PatternGraph::from_id(id).unwrap())
    }

    fn tiny_cfg() -> PackerConfig {
        PackerConfig { p: 0.3, m: 2, gamma: 0.5, epsilon: 0.5, u_prime_fraction: Some(1.0), ..PackerConfig::default() }
    }

    #[test]
    fn edgeless_host_is_empty_on_both_sides() {
        let g = HostGraph::empty(6);
        let r = cross_check(&g, &pat("C3"), &tiny_cfg(), &OracleLimits::default()).unwrap();
        assert!(!r.oracle_exists);
        assert_eq!(r.finder_found, Some(false));
        assert_eq!((r.oracle_covered, r.packer_covered), (0, 0));
        assert!(r.all_ok());
    }

    #[test]
    fn k33_and_k4_agree() {
        let g = gen_named("K3,3").unwrap();
        let r = cross_check(&g, &pat("K4"), &tiny_cfg(), &OracleLimits::default()).unwrap();
        assert!(r.finder_agrees(), "{r:?}");
        assert!(r.all_ok(), "{r:?}");
    }

    #[test]
    fn isolated_vertex_pattern() {
        let g = gen_named("K6").unwrap();
        let r = cross_check(&g, &pat("C3+iso"), &tiny_cfg(), &OracleLimits::default()).unwrap();
        assert_eq!(r.oracle_covered, 6);
        assert!(r.all_ok(), "{r:?}");
    }
}
