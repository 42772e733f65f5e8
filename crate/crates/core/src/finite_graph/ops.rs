use std::collections::{BTreeMap, BTreeSet};

use crate::error::{ForgeError, Result};
use crate::finite_graph::name::VertexName;
use crate::finite_graph::structure::{Kind, Part, Structure};

/// How the parts of the second operand line up with the first in a bipartite union.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PartPairing {
    /// Part 0 with part 0.
    #[default]
    Aligned,
    /// Part 0 of the second operand joins part 1 of the first.
    Swapped,
}

/// Complement. For bipartite graphs this is the bipartite complement.
pub fn complement(g: &Structure) -> Structure {
    if g.kind() == Kind::Bipartite {
        return bipartite_complement(g);
    }
    let vs: Vec<_> = g.vertices().iter().collect();
    let mut pairs = Vec::new();
    for u in &vs {
        for v in &vs {
            if u == v {
                continue;
            }
            let keep = match g.kind() {
                Kind::Digraph => !g.adjacent(u, v),
                _ => u < v && !g.adjacent(u, v),
            };
            if keep {
                pairs.push(((*u).clone(), (*v).clone()));
            }
        }
    }
    Structure::build(g.kind(), g.vertices().clone(), pairs, BTreeMap::new())
        .expect("complement of a valid structure")
}

/// Keeps the parts and replaces the edge set by the missing cross-part pairs.
pub fn bipartite_complement(g: &Structure) -> Structure {
    assert_eq!(g.kind(), Kind::Bipartite, "bipartite_complement needs a bipartite graph");
    let zero = g.part_members(0);
    let one = g.part_members(1);
    let mut pairs = Vec::new();
    for u in &zero {
        for v in &one {
            if !g.adjacent(u, v) {
                pairs.push((u.clone(), v.clone()));
            }
        }
    }
    Structure::build(Kind::Bipartite, g.vertices().clone(), pairs, g.parts().clone())
        .expect("bipartite complement of a valid structure")
}

/// Disjoint union of two structures of the same kind. Names must not collide.
pub fn disjoint_union(g: &Structure, h: &Structure) -> Result<Structure> {
    disjoint_union_paired(g, h, PartPairing::Aligned)
}

pub fn disjoint_union_paired(
    g: &Structure,
    h: &Structure,
    pairing: PartPairing,
) -> Result<Structure> {
    if g.kind() != h.kind() {
        return Err(ForgeError::KindMismatch { expected: g.kind(), found: h.kind() });
    }
    if let Some(v) = g.vertices().intersection(h.vertices()).next() {
        return Err(ForgeError::NameCollision(v.clone()));
    }
    let vertices: BTreeSet<_> = g.vertices().union(h.vertices()).cloned().collect();
    let mut parts: BTreeMap<VertexName, Part> = g.parts().clone();
    for (v, p) in h.parts() {
        let p = match pairing {
            PartPairing::Aligned => *p,
            PartPairing::Swapped => 1 - *p,
        };
        parts.insert(v.clone(), p);
    }
    let pairs = g.edges().into_iter().chain(h.edges());
    Structure::build(g.kind(), vertices, pairs, parts)
}

/// Induced substructure on `keep`, which must be a non-empty subset of the vertices.
pub fn induced(g: &Structure, keep: &BTreeSet<VertexName>) -> Result<Structure> {
    if let Some(v) = keep.iter().find(|v| !g.contains(v)) {
        return Err(ForgeError::UnknownVertex(v.clone()));
    }
    let pairs = g.edges().into_iter().filter(|(u, v)| keep.contains(u) && keep.contains(v));
    let parts = g.parts().iter().filter(|(v, _)| keep.contains(*v)).map(|(v, p)| (v.clone(), *p));
    Structure::build(g.kind(), keep.clone(), pairs, parts.collect())
}

/// Complete graph on seeds `s0..s{n-1}`.
pub fn complete_graph(n: u32) -> Structure {
    let vs: Vec<_> = (0..n).map(VertexName::seed).collect();
    let mut pairs = Vec::new();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            pairs.push((vs[i].clone(), vs[j].clone()));
        }
    }
    Structure::graph(vs, pairs).expect("n > 0")
}

/// Complete digraph (every ordered pair an arc) on seeds `s0..s{n-1}`.
pub fn complete_digraph(n: u32) -> Structure {
    let vs: Vec<_> = (0..n).map(VertexName::seed).collect();
    let mut pairs = Vec::new();
    for u in &vs {
        for v in &vs {
            if u != v {
                pairs.push((u.clone(), v.clone()));
            }
        }
    }
    Structure::digraph(vs, pairs).expect("n > 0")
}

/// Complete bipartite graph with part 0 = `s0..s{a-1}` and part 1 = the next `b` seeds.
pub fn complete_bipartite(a: u32, b: u32) -> Structure {
    let zero: Vec<_> = (0..a).map(VertexName::seed).collect();
    let one: Vec<_> = (a..a + b).map(VertexName::seed).collect();
    let parts = zero.iter().map(|v| (v.clone(), 0)).chain(one.iter().map(|v| (v.clone(), 1)));
    let mut pairs = Vec::new();
    for u in &zero {
        for v in &one {
            pairs.push((u.clone(), v.clone()));
        }
    }
    Structure::bipartite(parts.collect::<Vec<_>>(), pairs).expect("a + b > 0")
}

/// Path `s0 - s1 - ... - s{n-1}`.
pub fn path_graph(n: u32) -> Structure {
    let vs: Vec<_> = (0..n).map(VertexName::seed).collect();
    let pairs = vs.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect::<Vec<_>>();
    Structure::graph(vs, pairs).expect("n > 0")
}
