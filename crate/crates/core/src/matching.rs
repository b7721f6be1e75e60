//! Maximum bipartite matching (Hopcroft–Karp), with optional warm start.

use std::collections::VecDeque;

const FREE: usize = usize::MAX;

/// Left vertices `0..adj.len()`, right vertices `0..right_n`; `adj[l]` lists
/// right neighbours. Returns `mate[l]` (or `usize::MAX` when unmatched).
///
/// `initial` must be a valid matching. Augmentation never unmatches a
/// vertex, so every left vertex matched on entry stays matched.
pub fn hopcroft_karp(adj: &[Vec<usize>], right_n: usize, initial: Option<&[usize]>) -> Vec<usize> {
    let left_n = adj.len();
    let mut mate_l = vec![FREE; left_n];
    let mut mate_r = vec![FREE; right_n];
    if let Some(init) = initial {
        for (l, &r) in init.iter().enumerate() {
            if r != FREE {
                debug_assert!(mate_r[r] == FREE && adj[l].contains(&r));
                mate_l[l] = r;
                mate_r[r] = l;
            }
        }
    }
    // cheap greedy start
    for l in 0..left_n {
        if mate_l[l] == FREE {
            if let Some(&r) = adj[l].iter().find(|&&r| mate_r[r] == FREE) {
                mate_l[l] = r;
                mate_r[r] = l;
            }
        }
    }
    let mut dist = vec![0usize; left_n];
    let mut iter = vec![0usize; left_n];
    loop {
        // BFS layering from free left vertices
        let mut queue = VecDeque::new();
        for l in 0..left_n {
            if mate_l[l] == FREE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let next = mate_r[r];
                if next == FREE {
                    found = true;
                } else if dist[next] == usize::MAX {
                    dist[next] = dist[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }
        iter.iter_mut().for_each(|i| *i = 0);
        for l in 0..left_n {
            if mate_l[l] == FREE {
                augment(l, adj, &mut mate_l, &mut mate_r, &mut dist, &mut iter);
            }
        }
    }
    mate_l
}

// Iterative DFS along the layered graph.
fn augment(
    root: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
    iter: &mut [usize],
) -> bool {
    let mut stack: Vec<usize> = vec![root];
    while let Some(&l) = stack.last() {
        if iter[l] >= adj[l].len() {
            dist[l] = usize::MAX;
            stack.pop();
            continue;
        }
        let r = adj[l][iter[l]];
        let next = mate_r[r];
        if next == FREE {
            // flip the path recorded on the stack
            let mut r_cur = r;
            while let Some(l2) = stack.pop() {
                let prev = mate_l[l2];
                mate_l[l2] = r_cur;
                mate_r[r_cur] = l2;
                r_cur = prev;
            }
            return true;
        }
        if dist[next] != usize::MAX && dist[next] == dist[l] + 1 {
            stack.push(next);
        } else {
            iter[l] += 1;
        }
    }
    false
}

pub fn matching_size(mate_l: &[usize]) -> usize {
    mate_l.iter().filter(|&&r| r != FREE).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force_max(adj: &[Vec<usize>], right_n: usize) -> usize {
        fn go(l: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
            if l == adj.len() {
                return 0;
            }
            let mut best = go(l + 1, adj, used);
            for &r in &adj[l] {
                if !used[r] {
                    used[r] = true;
                    best = best.max(1 + go(l + 1, adj, used));
                    used[r] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; right_n])
    }

    #[test]
    fn perfect_matching_on_crown() {
        let adj: Vec<Vec<usize>> = (0..4).map(|l| (0..4).filter(|&r| r != l).collect()).collect();
        let mate = hopcroft_karp(&adj, 4, None);
        assert_eq!(matching_size(&mate), 4);
    }

    #[test]
    fn warm_start_keeps_matched_left_vertices() {
        // l0-r0 preset; l1 only sees r0 -> maximum is 2 via l0-r1, l1-r0
        let adj = vec![vec![0, 1], vec![0]];
        let mate = hopcroft_karp(&adj, 2, Some(&[0, FREE]));
        assert_eq!(matching_size(&mate), 2);
        assert_ne!(mate[0], FREE);
    }

    proptest! {
        #[test]
        fn matches_brute_force(left in 1usize..7, right in 1usize..7, bits in any::<u64>()) {
            let adj: Vec<Vec<usize>> = (0..left)
                .map(|l| (0..right).filter(|&r| (bits >> ((l * 7 + r) % 64)) & 1 == 1).collect())
                .collect();
            let mate = hopcroft_karp(&adj, right, None);
            let mut seen = vec![false; right];
            for (l, &r) in mate.iter().enumerate() {
                if r != FREE {
                    prop_assert!(adj[l].contains(&r));
                    prop_assert!(!seen[r]);
                    seen[r] = true;
                }
            }
            prop_assert_eq!(matching_size(&mate), brute_force_max(&adj, right));
        }
    }
}
