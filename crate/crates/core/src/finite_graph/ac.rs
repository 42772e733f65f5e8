//! Finite witness-counting checks for algebraic closure.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::finite_graph::name::VertexName;
use crate::finite_graph::structure::{Kind, Part, Structure};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AcReport {
    pub holds: bool,
    /// First failing subset in (size, lexicographic) order.
    pub failing_subset: Option<BTreeSet<VertexName>>,
    pub witnesses_found: Option<usize>,
    pub subsets_checked: usize,
}

/// Restrictions for [`ac_check_within`].
#[derive(Clone, Debug, Default)]
pub struct AcScope<'a> {
    /// Only subsets of this set are tested.
    pub subsets_from: Option<&'a BTreeSet<VertexName>>,
    /// Only these vertices count as witnesses.
    pub witnesses_in: Option<&'a BTreeSet<VertexName>>,
}

/// Checks that every subset `A` of size at most `k` has at least `m` witnesses.
///
/// A witness for `A` is joined to every member of `A`: by an edge for graphs,
/// by arcs in both directions for digraphs. For bipartite graphs `A` ranges over
/// subsets of a single part and witnesses lie in the opposite part.
pub fn ac_check(g: &Structure, m: usize, k: Option<usize>) -> AcReport {
    ac_check_within(g, m, k, &AcScope::default())
}

pub fn ac_check_within(g: &Structure, m: usize, k: Option<usize>, scope: &AcScope<'_>) -> AcReport {
    let all: Vec<&VertexName> = g
        .vertices()
        .iter()
        .filter(|v| scope.subsets_from.is_none_or(|s| s.contains(*v)))
        .collect();
    let pools: Vec<(Option<Part>, Vec<&VertexName>)> = if g.kind() == Kind::Bipartite {
        (0..2u8).map(|p| (Some(p), all.iter().copied().filter(|v| g.part(v) == Some(p)).collect())).collect()
    } else {
        vec![(None, all.clone())]
    };
    let max_size = k.unwrap_or(all.len()).min(all.len());
    let mut checked = 0;
    for size in 0..=max_size {
        let mut failures: Vec<(BTreeSet<VertexName>, usize)> = Vec::new();
        for (part, pool) in &pools {
            if size > pool.len() {
                continue;
            }
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                let subset: Vec<&VertexName> = idx.iter().map(|&i| pool[i]).collect();
                checked += 1;
                let n = count_witnesses(g, &subset, *part, scope.witnesses_in, m);
                if n < m {
                    failures.push((subset.into_iter().cloned().collect(), n));
                    break;
                }
                if !next_combination(&mut idx, pool.len()) {
                    break;
                }
            }
        }
        if let Some((subset, n)) = failures.into_iter().min() {
            return AcReport {
                holds: false,
                failing_subset: Some(subset),
                witnesses_found: Some(n),
                subsets_checked: checked,
            };
        }
    }
    AcReport { holds: true, failing_subset: None, witnesses_found: None, subsets_checked: checked }
}

fn count_witnesses(
    g: &Structure,
    subset: &[&VertexName],
    part: Option<Part>,
    pool: Option<&BTreeSet<VertexName>>,
    stop_at: usize,
) -> usize {
    let mut n = 0;
    for w in g.vertices() {
        if pool.is_some_and(|p| !p.contains(w)) {
            continue;
        }
        if let Some(p) = part {
            if g.part(w) == Some(p) {
                continue;
            }
        }
        let joined = subset.iter().all(|a| match g.kind() {
            Kind::Digraph => g.adjacent(w, a) && g.adjacent(a, w),
            _ => g.adjacent(w, a),
        });
        if joined {
            n += 1;
            if n >= stop_at {
                break;
            }
        }
    }
    n
}

/// Advances `idx` to the next `idx.len()`-combination of `0..n` in lexicographic order.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_graph::ops::{complete_bipartite, complete_graph, path_graph};

    #[test]
    fn small_examples() {
        assert!(!ac_check(&complete_bipartite(1, 1), 2, None).holds);
        assert!(ac_check(&complete_bipartite(2, 3), 1, None).holds);
        let p = path_graph(3);
        let r = ac_check(&p, 1, None);
        assert!(!r.holds);
        // {s0, s1} has no common neighbour; the singletons and the empty set do.
        assert_eq!(r.failing_subset.unwrap().len(), 2);
    }

    #[test]
    fn complete_graph_fails_only_on_the_full_set() {
        let k = complete_graph(4);
        assert!(ac_check(&k, 1, Some(3)).holds);
        let r = ac_check(&k, 1, Some(4));
        assert_eq!(r.failing_subset.unwrap().len(), 4);
    }

    #[test]
    fn combinations_enumerate_in_order() {
        let mut idx = vec![0, 1];
        let mut seen = vec![idx.clone()];
        while next_combination(&mut idx, 4) {
            seen.push(idx.clone());
        }
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }
}
