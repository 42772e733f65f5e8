//! Backtracking isomorphism search.

use crate::error::{ForgeError, Result};
use crate::finite_graph::maps::VertexMap;
use crate::finite_graph::structure::{Dense, Kind, Structure};

/// Default vertex cap for the brute-force searches.
pub const DEFAULT_ISO_CAP: usize = 12;

pub fn automorphisms(g: &Structure) -> Result<Vec<VertexMap>> {
    automorphisms_with_cap(g, DEFAULT_ISO_CAP)
}

/// All automorphisms, sorted. Bipartite automorphisms may swap the parts.
pub fn automorphisms_with_cap(g: &Structure, cap: usize) -> Result<Vec<VertexMap>> {
    check_cap(g, cap)?;
    let d = g.dense();
    let mut out = Vec::new();
    Search::new(&d, &d).run(&mut |f| {
        out.push(to_map(&d, &d, f));
        true
    });
    out.sort();
    Ok(out)
}

pub fn count_automorphisms_with_cap(g: &Structure, cap: usize) -> Result<usize> {
    check_cap(g, cap)?;
    let d = g.dense();
    let mut n = 0;
    Search::new(&d, &d).run(&mut |_| {
        n += 1;
        true
    });
    Ok(n)
}

pub fn isomorphic(g: &Structure, h: &Structure) -> Result<bool> {
    Ok(isomorphism_with_cap(g, h, DEFAULT_ISO_CAP)?.is_some())
}

pub fn isomorphic_with_cap(g: &Structure, h: &Structure, cap: usize) -> Result<bool> {
    Ok(isomorphism_with_cap(g, h, cap)?.is_some())
}

/// First isomorphism found, if any.
pub fn isomorphism_with_cap(g: &Structure, h: &Structure, cap: usize) -> Result<Option<VertexMap>> {
    check_cap(g, cap)?;
    check_cap(h, cap)?;
    if g.kind() != h.kind() || g.len() != h.len() || g.edge_count() != h.edge_count() {
        return Ok(None);
    }
    let (a, b) = (g.dense(), h.dense());
    let mut found = None;
    Search::new(&a, &b).run(&mut |f| {
        found = Some(to_map(&a, &b, f));
        false
    });
    Ok(found)
}

fn check_cap(g: &Structure, cap: usize) -> Result<()> {
    if g.len() > cap {
        return Err(ForgeError::CapExceeded {
            what: "isomorphism search".into(),
            size: g.len() as u128,
            cap: cap as u128,
        });
    }
    Ok(())
}

fn to_map(a: &Dense, b: &Dense, f: &[usize]) -> VertexMap {
    f.iter().enumerate().map(|(i, &j)| (a.names[i].clone(), b.names[j].clone())).collect()
}

struct Search<'a> {
    a: &'a Dense,
    b: &'a Dense,
    order: Vec<usize>,
    deg_a: Vec<(usize, usize)>,
    deg_b: Vec<(usize, usize)>,
}

impl<'a> Search<'a> {
    fn new(a: &'a Dense, b: &'a Dense) -> Self {
        let n = a.len();
        let deg = |d: &Dense| (0..d.len()).map(|i| (d.out_degree(i), d.in_degree(i))).collect::<Vec<_>>();
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut placed = vec![false; n];
        for _ in 0..n {
            let next = (0..n)
                .filter(|&i| !placed[i])
                .max_by_key(|&i| {
                    let links = order.iter().filter(|&&k| a.adj[i][k] || a.adj[k][i]).count();
                    (links, a.out_degree(i) + a.in_degree(i), std::cmp::Reverse(i))
                })
                .unwrap();
            placed[next] = true;
            order.push(next);
        }
        Search { a, b, order, deg_a: deg(a), deg_b: deg(b) }
    }

    /// Calls `visit` on each isomorphism until it returns false.
    fn run(&self, visit: &mut dyn FnMut(&[usize]) -> bool) {
        if self.a.len() != self.b.len() {
            return;
        }
        let n = self.a.len();
        let mut f = vec![usize::MAX; n];
        let mut used = vec![false; n];
        let mut sigma = [None; 2];
        self.step(0, &mut f, &mut used, &mut sigma, visit);
    }

    fn step(
        &self,
        depth: usize,
        f: &mut [usize],
        used: &mut [bool],
        sigma: &mut [Option<u8>; 2],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if depth == self.order.len() {
            return visit(f);
        }
        let i = self.order[depth];
        let bip = self.a.kind == Kind::Bipartite;
        for j in 0..self.b.len() {
            if used[j] || self.deg_a[i] != self.deg_b[j] {
                continue;
            }
            let (p, q) = (self.a.part[i] as usize, self.b.part[j]);
            let saved = *sigma;
            if bip {
                match sigma[p] {
                    Some(t) if t != q => continue,
                    Some(_) => {}
                    None => {
                        if sigma[1 - p] == Some(q) {
                            continue;
                        }
                        sigma[p] = Some(q);
                    }
                }
            }
            let consistent = self.order[..depth].iter().all(|&k| {
                self.a.adj[i][k] == self.b.adj[j][f[k]] && self.a.adj[k][i] == self.b.adj[f[k]][j]
            });
            if consistent {
                f[i] = j;
                used[j] = true;
                let go_on = self.step(depth + 1, f, used, sigma, visit);
                used[j] = false;
                f[i] = usize::MAX;
                if !go_on {
                    *sigma = saved;
                    return false;
                }
            }
            *sigma = saved;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_graph::name::VertexName;
    use crate::finite_graph::ops::{complete_bipartite, complete_graph, disjoint_union, path_graph};

    #[test]
    fn small_automorphism_groups() {
        assert_eq!(automorphisms(&complete_graph(3)).unwrap().len(), 6);
        assert_eq!(automorphisms(&path_graph(4)).unwrap().len(), 2);
        // Part swaps count: K_{2,2} has 2 * 2 * 2 automorphisms.
        assert_eq!(automorphisms(&complete_bipartite(2, 2)).unwrap().len(), 8);
        assert_eq!(automorphisms(&complete_bipartite(1, 2)).unwrap().len(), 2);
    }

    #[test]
    fn two_disjoint_edges() {
        let k = complete_graph(2);
        let k2 = k.relabel(|v| VertexName::gadget_over("c", 0, vec![v.clone()])).unwrap();
        let u = disjoint_union(&k, &k2).unwrap();
        assert_eq!(automorphisms(&u).unwrap().len(), 8);
    }

    #[test]
    fn cap_is_enforced() {
        let g = path_graph(13);
        assert!(matches!(automorphisms(&g), Err(ForgeError::CapExceeded { .. })));
        assert_eq!(automorphisms_with_cap(&g, 13).unwrap().len(), 2);
    }

    #[test]
    fn isomorphism_distinguishes_paths_and_stars() {
        let p = path_graph(4);
        let star = Structure::graph(
            (0..4).map(VertexName::seed),
            (1..4).map(|i| (VertexName::seed(0), VertexName::seed(i))),
        )
        .unwrap();
        assert!(!isomorphic(&p, &star).unwrap());
        let q = p.relabel(|v| VertexName::gadget_over("q", 0, vec![v.clone()])).unwrap();
        assert!(isomorphic(&p, &q).unwrap());
    }
}
