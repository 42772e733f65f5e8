//! Gadget graphs and graph transformations, in finite or truncated form.
//!
//! Vertex naming: path vertices `g:l.n`, pendants `g:v.n`, apexes `g:x.i` and
//! `g:y.i`, arc gadgets `g:x.0[u,v]` (and `y`, `z`), edge midpoints
//! `g:m.0[u,v]`, blow-up copies `g:b.r[v]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};
use crate::finite_graph::{
    complement, disjoint_union, Kind, Part, Structure, VertexMap, VertexName,
};

/// A finite set of indices, each at least 2.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct IndexSet(BTreeSet<u64>);

impl IndexSet {
    pub fn new(items: impl IntoIterator<Item = u64>) -> Result<Self> {
        let set: BTreeSet<u64> = items.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&n| n < 2) {
            return Err(ForgeError::BadIndex(bad));
        }
        Ok(IndexSet(set))
    }

    pub fn empty() -> Self {
        IndexSet(BTreeSet::new())
    }

    pub fn contains(&self, n: u64) -> bool {
        self.0.contains(&n)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `{n + k : n in S}`.
    pub fn shift(&self, k: u64) -> IndexSet {
        IndexSet(self.0.iter().map(|n| n + k).collect())
    }
}

impl TryFrom<Vec<u64>> for IndexSet {
    type Error = ForgeError;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        IndexSet::new(v)
    }
}

impl From<IndexSet> for Vec<u64> {
    fn from(s: IndexSet) -> Vec<u64> {
        s.0.into_iter().collect()
    }
}

impl FromStr for IndexSet {
    type Err = ForgeError;

    /// Comma list such as `2,4,5`; the empty string is the empty set.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "{}" {
            return Ok(IndexSet::empty());
        }
        let s = s.trim_start_matches('{').trim_end_matches('}');
        let items = s
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| ForgeError::Invalid(format!("bad index {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        IndexSet::new(items)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

pub fn ell(n: u64) -> VertexName {
    VertexName::gadget("l", n as u32)
}

pub fn pendant(n: u64) -> VertexName {
    VertexName::gadget("v", n as u32)
}

fn apex(label: &str, i: usize) -> VertexName {
    VertexName::gadget(label, i as u32)
}

/// Vertex set, edge list and parity parts of the truncation of `L_S` to `ℓ0..ℓN`.
fn l_parts(s: &IndexSet, n: u64) -> (Vec<(VertexName, Part)>, Vec<(VertexName, VertexName)>) {
    for k in s.iter().filter(|&k| k > n) {
        log::warn!("index {k} exceeds the truncation length {n} and is ignored");
    }
    let mut vs = Vec::new();
    let mut es = Vec::new();
    for i in 0..=n {
        vs.push((ell(i), (i % 2) as Part));
        if i > 0 {
            es.push((ell(i - 1), ell(i)));
        }
        if s.contains(i) {
            vs.push((pendant(i), ((i + 1) % 2) as Part));
            es.push((ell(i), pendant(i)));
        }
    }
    (vs, es)
}

/// Path `ℓ0 .. ℓN` with a pendant `v_n` at each `n ∈ S`, `n ≤ N`.
pub fn build_l(s: &IndexSet, n: u64) -> Structure {
    let (vs, es) = l_parts(s, n);
    Structure::graph(vs.into_iter().map(|(v, _)| v), es).expect("L_S is well formed")
}

/// [`build_l`] with every edge replaced by a pair of opposite arcs.
pub fn build_l_directed(s: &IndexSet, n: u64) -> Structure {
    let (vs, es) = l_parts(s, n);
    let arcs = es.into_iter().flat_map(|(a, b)| [(a.clone(), b.clone()), (b, a)]);
    Structure::digraph(vs.into_iter().map(|(v, _)| v), arcs.collect::<Vec<_>>())
        .expect("directed L_S is well formed")
}

/// [`build_l`] as a bipartite graph: part 0 holds the even path vertices and
/// the pendants at odd indices.
pub fn build_lambda(s: &IndexSet, n: u64) -> Structure {
    let (vs, es) = l_parts(s, n);
    Structure::bipartite(vs, es).expect("Lambda_S is well formed")
}

/// `L_S` plus `k` apexes `x_i`, each joined to every other vertex.
pub fn build_m(s: &IndexSet, n: u64, k: usize) -> Structure {
    let l = build_l(s, n);
    let xs: Vec<_> = (0..k).map(|i| apex("x", i)).collect();
    let mut edges = l.edges();
    for (i, x) in xs.iter().enumerate() {
        for v in l.vertices() {
            edges.push((x.clone(), v.clone()));
        }
        for y in &xs[i + 1..] {
            edges.push((x.clone(), y.clone()));
        }
    }
    Structure::graph(l.vertices().iter().cloned().chain(xs), edges).expect("M_S is well formed")
}

/// `Λ_S` plus `k` apexes `x_i` in part 0 joined to all of part 1, and `k`
/// apexes `y_i` in part 1 joined to all of part 0.
pub fn build_n(s: &IndexSet, n: u64, k: usize) -> Structure {
    let lam = build_lambda(s, n);
    let mut parts: BTreeMap<VertexName, Part> = lam.parts().clone();
    for i in 0..k {
        parts.insert(apex("x", i), 0);
        parts.insert(apex("y", i), 1);
    }
    let is = |w: &VertexName, l: &str| matches!(w, VertexName::Gadget { label, .. } if label == l);
    let mut edges = lam.edges();
    for (u, &p) in &parts {
        for (v, &q) in &parts {
            if p == 0 && q == 1 && (is(u, "x") || is(v, "y")) {
                edges.push((u.clone(), v.clone()));
            }
        }
    }
    Structure::bipartite(parts, edges).expect("N_S is well formed")
}

/// Replaces each arc `u -> v` of a digraph by the undirected gadget
/// `u - x - y - v` with a pendant `z` on `y`.
pub fn dashv(d: &Structure) -> Result<Structure> {
    if d.kind() != Kind::Digraph {
        return Err(ForgeError::KindMismatch { expected: Kind::Digraph, found: d.kind() });
    }
    let mut vs: BTreeSet<VertexName> = d.vertices().clone();
    let mut es = Vec::new();
    for (u, v) in d.edges() {
        let g = |l: &str| VertexName::gadget_over(l, 0, vec![u.clone(), v.clone()]);
        let (x, y, z) = (g("x"), g("y"), g("z"));
        for w in [&x, &y, &z] {
            if !vs.insert(w.clone()) {
                return Err(ForgeError::NameCollision(w.clone()));
            }
        }
        es.push((u.clone(), x.clone()));
        es.push((x, y.clone()));
        es.push((y.clone(), z));
        es.push((y, v.clone()));
    }
    Structure::graph(vs, es)
}

/// Subdivides every edge once; old vertices form part 0, midpoints part 1.
pub fn prime(g: &Structure) -> Result<Structure> {
    if g.kind() != Kind::Graph {
        return Err(ForgeError::KindMismatch { expected: Kind::Graph, found: g.kind() });
    }
    let mut parts: BTreeMap<VertexName, Part> = g.vertices().iter().map(|v| (v.clone(), 0)).collect();
    let mut es = Vec::new();
    for (u, v) in g.edges() {
        let m = VertexName::gadget_over("m", 0, vec![u.clone(), v.clone()]);
        if parts.insert(m.clone(), 1).is_some() {
            return Err(ForgeError::NameCollision(m));
        }
        es.push((u, m.clone()));
        es.push((v, m));
    }
    Structure::bipartite(parts, es)
}

/// Copy `v_{i,r}` of base vertex `v_i`.
pub fn blown(v: &VertexName, r: usize) -> VertexName {
    VertexName::gadget_over("b", r as u32, vec![v.clone()])
}

/// Replaces each vertex by `r` independent copies and each edge by a complete
/// bipartite graph `K_{r,r}`. Copies inherit the part of their base vertex.
pub fn blowup(g: &Structure, r: usize) -> Result<Structure> {
    if r == 0 || g.kind() == Kind::Digraph {
        return Err(ForgeError::Invalid("blowup needs r >= 1 and an undirected input".into()));
    }
    let mut vs = BTreeSet::new();
    let mut parts = BTreeMap::new();
    for v in g.vertices() {
        for j in 0..r {
            vs.insert(blown(v, j));
            if let Some(p) = g.part(v) {
                parts.insert(blown(v, j), p);
            }
        }
    }
    let mut es = Vec::new();
    for (u, v) in g.edges() {
        for a in 0..r {
            for b in 0..r {
                es.push((blown(&u, a), blown(&v, b)));
            }
        }
    }
    Structure::build(g.kind(), vs, es, parts)
}

/// Base vertices and copy count of a blow-up, recovered from its names.
pub fn blowup_base(sharp: &Structure) -> Result<(Vec<VertexName>, usize)> {
    let mut base = BTreeSet::new();
    let mut r = 0;
    for v in sharp.vertices() {
        match v {
            VertexName::Gadget { parents, label, index } if label == "b" && parents.len() == 1 => {
                base.insert(parents[0].clone());
                r = r.max(*index as usize + 1);
            }
            other => return Err(ForgeError::Invalid(format!("{other} is not a blow-up vertex"))),
        }
    }
    Ok((base.into_iter().collect(), r))
}

fn blowup_map(sharp: &Structure, b: &[usize], f: impl Fn(usize, usize, usize) -> usize) -> Result<VertexMap> {
    let (base, r) = blowup_base(sharp)?;
    if b.len() != base.len() {
        return Err(ForgeError::LengthMismatch { expected: base.len(), got: b.len() });
    }
    if let Some(&bad) = b.iter().find(|&&x| x >= r) {
        return Err(ForgeError::Invalid(format!("selector {bad} is not below {r}")));
    }
    let mut m = VertexMap::default();
    for (i, v) in base.iter().enumerate() {
        for j in 0..r {
            m.insert(blown(v, j), blown(v, f(j, b[i], r)));
        }
    }
    Ok(m)
}

/// `v_{i,j} ↦ v_{i,b_i}`: an idempotent onto the diagonal copy selected by `b`.
pub fn phi_b(sharp: &Structure, b: &[usize]) -> Result<VertexMap> {
    blowup_map(sharp, b, |_, bi, _| bi)
}

/// `v_{i,j} ↦ v_{i,j+b_i}` with addition modulo the copy count.
pub fn psi_b(sharp: &Structure, b: &[usize]) -> Result<VertexMap> {
    blowup_map(sharp, b, |j, bi, r| (j + bi) % r)
}

/// Truncation of `(g ∪̇ L_S)†`. L vertices are renamed if they clash with `g`.
pub fn delta_construction(g: &Structure, s: &IndexSet, n: u64) -> Result<Structure> {
    if g.kind() != Kind::Graph {
        return Err(ForgeError::KindMismatch { expected: Kind::Graph, found: g.kind() });
    }
    let mut l = build_l(s, n);
    if l.vertices().iter().any(|v| g.contains(v)) {
        l = l.relabel(|v| VertexName::gadget_over("lam", 0, vec![v.clone()]))?;
    }
    Ok(complement(&disjoint_union(g, &l)?))
}

/// Size limits for [`schutz_pair`].
#[derive(Clone, Debug)]
pub struct SchutzCaps {
    /// Largest subset receiving a witness at each stage.
    pub subset_size: usize,
    /// Truncation length `N` for each `L_{S_n}`.
    pub l_len: u64,
    /// Refuse to build more vertices than this.
    pub max_vertices: usize,
}

impl Default for SchutzCaps {
    fn default() -> Self {
        SchutzCaps { subset_size: 2, l_len: 4, max_vertices: 4096 }
    }
}

#[derive(Clone, Debug)]
pub struct SchutzStage {
    pub l_vertices: BTreeSet<VertexName>,
    /// Witness vertices with the subset each is joined to.
    pub witnesses: Vec<(VertexName, BTreeSet<VertexName>)>,
}

/// A finite truncation of the pair `(V*, E*)`, `(V*, E₀)`.
#[derive(Clone, Debug)]
pub struct SchutzPair {
    pub e_star: Structure,
    pub e_zero: Structure,
    pub base: BTreeSet<VertexName>,
    pub stages: Vec<SchutzStage>,
}

/// Stage `n+1` adds a copy of the `L_{S_n}` truncation (named `g:L.n[...]`,
/// isolated in `E*`) and a witness `w{n+1}.i` joined to the `i`-th subset of
/// the stage-`n` vertices. Stage 0 is the complement of `g`. `E₀` is every
/// pair except the edges of `g`, pairs of same-stage witnesses, edges of each
/// `L_{S_n}`, and pairs joining `L_{S_n}` to the stage-`n+1` witnesses.
pub fn schutz_pair(g: &Structure, s_seq: &[IndexSet], stages: usize, caps: &SchutzCaps) -> Result<SchutzPair> {
    if g.kind() != Kind::Graph {
        return Err(ForgeError::KindMismatch { expected: Kind::Graph, found: g.kind() });
    }
    if s_seq.len() < stages {
        return Err(ForgeError::Invalid(format!("{stages} stages need {stages} index sets, got {}", s_seq.len())));
    }
    if let Some(v) = g.vertices().iter().find(|v| matches!(v, VertexName::Witness { .. })) {
        return Err(ForgeError::Invalid(format!("base vertex {v} uses a witness name")));
    }
    let base = g.vertices().clone();
    let mut current: BTreeSet<VertexName> = base.clone();
    let mut star_edges: Vec<(VertexName, VertexName)> = complement(g).edges();
    let mut out_stages = Vec::new();
    for (n, s) in s_seq.iter().enumerate().take(stages) {
        let l = build_l(s, caps.l_len)
            .relabel(|v| VertexName::gadget_over("L", n as u32, vec![v.clone()]))?;
        let order: Vec<VertexName> = current.iter().cloned().collect();
        let k = caps.subset_size.min(order.len());
        let mut subsets = Vec::new();
        for size in 0..=k {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                subsets.push(idx.iter().map(|&i| order[i].clone()).collect::<BTreeSet<_>>());
                let total = current.len() + l.len() + subsets.len();
                if total > caps.max_vertices {
                    return Err(ForgeError::CapExceeded {
                        what: "schutz_pair vertex count".into(),
                        size: total as u128,
                        cap: caps.max_vertices as u128,
                    });
                }
                if !crate::finite_graph::ac::next_combination(&mut idx, order.len()) {
                    break;
                }
            }
        }
        let mut witnesses = Vec::new();
        for (i, a) in subsets.into_iter().enumerate() {
            let w = VertexName::witness(n as u32 + 1, i as u64);
            for v in &a {
                star_edges.push((w.clone(), v.clone()));
            }
            witnesses.push((w, a));
        }
        for v in l.vertices() {
            if !current.insert(v.clone()) {
                return Err(ForgeError::NameCollision(v.clone()));
            }
        }
        current.extend(witnesses.iter().map(|(w, _)| w.clone()));
        out_stages.push(SchutzStage { l_vertices: l.vertices().clone(), witnesses });
    }
    let e_star = Structure::graph(current.iter().cloned(), star_edges)?;

    let mut excluded: BTreeSet<(VertexName, VertexName)> = g.edges().into_iter().collect();
    for (n, st) in out_stages.iter().enumerate() {
        let ws: Vec<&VertexName> = st.witnesses.iter().map(|(w, _)| w).collect();
        for (i, a) in ws.iter().enumerate() {
            for b in &ws[i + 1..] {
                excluded.insert(ordered(a, b));
            }
            for v in &st.l_vertices {
                excluded.insert(ordered(a, v));
            }
        }
        let l = build_l(&s_seq[n], caps.l_len)
            .relabel(|v| VertexName::gadget_over("L", n as u32, vec![v.clone()]))?;
        excluded.extend(l.edges());
    }
    let all: Vec<&VertexName> = current.iter().collect();
    let mut zero_edges = Vec::new();
    for (i, u) in all.iter().enumerate() {
        for v in &all[i + 1..] {
            if !excluded.contains(&((*u).clone(), (*v).clone())) {
                zero_edges.push(((*u).clone(), (*v).clone()));
            }
        }
    }
    let e_zero = Structure::graph(current.iter().cloned(), zero_edges)?;
    Ok(SchutzPair { e_star, e_zero, base, stages: out_stages })
}

fn ordered(a: &VertexName, b: &VertexName) -> (VertexName, VertexName) {
    if a < b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_graph::{
        automorphisms, automorphisms_with_cap, check_embedding, check_homomorphism, complete_digraph,
        complete_graph, image, induced, isomorphic, isomorphic_with_cap,
    };

    fn set(items: &[u64]) -> IndexSet {
        IndexSet::new(items.iter().copied()).unwrap()
    }

    #[test]
    fn index_sets_parse_and_validate() {
        assert_eq!("2,4,5".parse::<IndexSet>().unwrap(), set(&[2, 4, 5]));
        assert_eq!("".parse::<IndexSet>().unwrap(), IndexSet::empty());
        assert!(matches!("1,3".parse::<IndexSet>(), Err(ForgeError::BadIndex(1))));
        assert_eq!(set(&[2, 3]).shift(2), set(&[4, 5]));
    }

    #[test]
    fn l_shapes() {
        let l = build_l(&set(&[2, 4, 5]), 6);
        assert_eq!(l.len(), 10);
        assert_eq!(l.edge_count(), 9);
        let p = build_l(&IndexSet::empty(), 3);
        assert_eq!((p.len(), p.edge_count()), (4, 3));
        let lam = build_lambda(&set(&[2]), 3);
        assert_eq!(lam.part_members(0), [ell(0), ell(2)].into());
        assert_eq!(lam.part_members(1), [ell(1), ell(3), pendant(2)].into());
        let d = build_l_directed(&set(&[2]), 3);
        assert_eq!(d.edge_count(), 8);
    }

    #[test]
    fn members_beyond_truncation_are_dropped() {
        assert_eq!(build_l(&set(&[2, 9]), 4), build_l(&set(&[2]), 4));
    }

    #[test]
    fn l_degree_profile_away_from_the_boundary() {
        // For N >= max(S) + 2 the only degree-1 vertices are ℓ0, the pendants
        // and ℓN, and ℓ0 is the only one whose neighbour has degree 2.
        for s in [set(&[2]), set(&[3, 5]), set(&[2, 4, 5])] {
            let n = s.iter().max().unwrap() + 2;
            let l = build_l(&s, n);
            let leaves: Vec<_> = l.vertices().iter().filter(|v| l.neighbors(v).len() == 1).collect();
            let next_to_degree_two: Vec<_> = leaves
                .iter()
                .filter(|v| l.neighbors(v).iter().all(|w| l.neighbors(w).len() == 2))
                .collect();
            assert!(next_to_degree_two.contains(&&&ell(0)), "{s}");
            assert!(next_to_degree_two.iter().all(|v| ***v == ell(0) || ***v == ell(n)), "{s}");
        }
    }

    #[test]
    fn shifted_l_embeds() {
        let subsets: Vec<IndexSet> = (0u32..32)
            .map(|m| IndexSet::new((2..=6).filter(|i| m >> (i - 2) & 1 == 1)).unwrap())
            .collect();
        for s in &subsets {
            for t in &subsets {
                for k in 0..=3 {
                    if !s.shift(k).iter().all(|x| t.contains(x)) {
                        continue;
                    }
                    let (a, b) = (build_l(s, 8), build_l(t, 8 + k));
                    let f: VertexMap = a
                        .vertices()
                        .iter()
                        .map(|v| match v {
                            VertexName::Gadget { label, index, .. } => {
                                (v.clone(), VertexName::gadget(label, index + k as u32))
                            }
                            _ => unreachable!(),
                        })
                        .collect();
                    assert!(check_homomorphism(&f, &a, &b) && f.is_injective(), "{s} {t} {k}");
                }
            }
        }
    }

    #[test]
    fn l_automorphisms_and_isomorphism() {
        // The truncated path ℓ0..ℓ4 is symmetric about ℓ2, and the pendant at 2
        // does not break the symmetry.
        assert_eq!(automorphisms(&build_l(&set(&[2]), 4)).unwrap().len(), 2);
        assert_eq!(automorphisms(&build_l(&set(&[2]), 6)).unwrap().len(), 1);
        assert!(!isomorphic(&build_l(&set(&[2]), 6), &build_l(&set(&[3]), 6)).unwrap());
    }

    #[test]
    fn m_and_n_automorphisms() {
        // 2 (path reflection at N = 4) times 3! apex permutations.
        assert_eq!(automorphisms(&build_m(&set(&[2]), 4, 3)).unwrap().len(), 12);
        assert_eq!(automorphisms(&build_m(&set(&[2]), 6, 3)).unwrap().len(), 6);
        let m = build_m(&IndexSet::empty(), 2, 1);
        assert_eq!((m.len(), m.edge_count()), (4, 5));

        let apexes: BTreeSet<VertexName> = [apex("x", 0), apex("x", 1), apex("y", 0), apex("y", 1)].into();
        for n in [4u64, 6] {
            let g = build_n(&set(&[2]), n, 2);
            let auts = automorphisms_with_cap(&g, 16).unwrap();
            for a in &auts {
                assert!(g.vertices().iter().all(|v| g.part(v) == g.part(a.get(v).unwrap())));
            }
            let moving_only_apexes =
                auts.iter().all(|a| a.iter().all(|(v, w)| v == w || apexes.contains(v)));
            // At N = 4, ℓ2 is joined to all of part 1 and acts as a third x apex,
            // and the reflection ℓi ↦ ℓ(4-i) preserves parity: 3! * 2! * 2.
            assert_eq!(auts.len(), if n == 4 { 24 } else { 4 });
            assert_eq!(moving_only_apexes, n == 6);
        }
    }

    #[test]
    fn dashv_shapes() {
        let a = VertexName::seed(0);
        let b = VertexName::seed(1);
        let d = Structure::digraph([a.clone(), b.clone()], [(a.clone(), b.clone())]).unwrap();
        let g = dashv(&d).unwrap();
        assert_eq!((g.len(), g.edge_count()), (5, 4));
        let empty = Structure::digraph([a.clone(), b.clone()], Vec::new()).unwrap();
        let g = dashv(&empty).unwrap();
        assert_eq!((g.len(), g.edge_count()), (2, 0));
        let g = dashv(&complete_digraph(3)).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(automorphisms_with_cap(&g, 21).unwrap().len(), 6);
    }

    #[test]
    fn prime_shapes() {
        let p = prime(&complete_graph(2)).unwrap();
        assert_eq!((p.len(), p.edge_count()), (3, 2));
        let p4 = prime(&complete_graph(4)).unwrap();
        assert_eq!((p4.len(), p4.edge_count()), (10, 12));
        assert_eq!(automorphisms(&p4).unwrap().len(), 24);
        assert_eq!(automorphisms(&prime(&complete_graph(3)).unwrap()).unwrap().len(), 12);
    }

    #[test]
    fn blowups() {
        let k22 = crate::finite_graph::complete_bipartite(2, 2);
        let sharp = blowup(&complete_graph(2), 2).unwrap();
        assert_eq!(sharp.kind(), Kind::Graph);
        assert_eq!((sharp.len(), sharp.edge_count()), (4, 4));
        let as_graph = Structure::graph(k22.vertices().iter().cloned(), k22.edges()).unwrap();
        assert!(isomorphic(&sharp, &as_graph).unwrap());
        let k33 = blowup(&complete_graph(2), 3).unwrap();
        assert_eq!((k33.len(), k33.edge_count()), (6, 9));
        let empty3 = Structure::graph((0..3).map(VertexName::seed), Vec::new()).unwrap();
        let e = blowup(&empty3, 5).unwrap();
        assert_eq!((e.len(), e.edge_count()), (15, 0));
        let bip = blowup(&crate::finite_graph::complete_bipartite(1, 1), 2).unwrap();
        assert_eq!(bip.part_members(0).len(), 2);
    }

    #[test]
    fn phi_and_psi() {
        let sharp = blowup(&complete_graph(2), 2).unwrap();
        let (s0, s1) = (VertexName::seed(0), VertexName::seed(1));
        let phi = phi_b(&sharp, &[0, 1]).unwrap();
        assert_eq!(phi.image_set(), [blown(&s0, 0), blown(&s1, 1)].into());
        let im = image(&phi, &sharp, &sharp).unwrap();
        assert!(isomorphic(&im.induced, &complete_graph(2)).unwrap());

        let phi00 = phi_b(&sharp, &[0, 0]).unwrap();
        assert!(check_homomorphism(&phi00, &sharp, &sharp));
        assert!(!check_embedding(&phi00, &sharp, &sharp));
        let im = image(&phi00, &sharp, &sharp).unwrap();
        assert_eq!(im.vertices, [blown(&s0, 0), blown(&s1, 0)].into());
        assert!(im.equal);

        assert_eq!(psi_b(&sharp, &[0, 0]).unwrap(), VertexMap::identity(&sharp));
        assert!(matches!(phi_b(&sharp, &[0]), Err(ForgeError::LengthMismatch { .. })));
    }

    #[test]
    fn diagonal_of_sharp_is_the_base() {
        let g = crate::finite_graph::path_graph(3);
        let sharp = blowup(&g, 2).unwrap();
        let keep = [blown(&VertexName::seed(0), 1), blown(&VertexName::seed(1), 0), blown(&VertexName::seed(2), 1)].into();
        assert!(isomorphic(&induced(&sharp, &keep).unwrap(), &g).unwrap());
    }

    #[test]
    fn delta_on_triangle() {
        let d = delta_construction(&complete_graph(3), &set(&[2]), 4).unwrap();
        assert_eq!(d.len(), 9);
        // Aut(K3) times the reflection of the ℓ0..ℓ4 path.
        assert_eq!(automorphisms(&d).unwrap().len(), 12);
        assert_eq!(automorphisms_with_cap(&delta_construction(&complete_graph(3), &set(&[2]), 6).unwrap(), 13).unwrap().len(), 6);
        // Renaming kicks in when the base already uses L names.
        let clash = build_l(&IndexSet::empty(), 1);
        assert_eq!(delta_construction(&clash, &IndexSet::empty(), 1).unwrap().len(), 4);
    }

    #[test]
    fn delta_family_at_n4() {
        let subsets: Vec<IndexSet> =
            (0u32..8).map(|m| IndexSet::new((2..=4).filter(|i| m >> (i - 2) & 1 == 1)).unwrap()).collect();
        let ds: Vec<_> =
            subsets.iter().map(|s| delta_construction(&complete_graph(3), s, 4).unwrap()).collect();
        let mut iso_pairs = Vec::new();
        for i in 0..ds.len() {
            for j in i + 1..ds.len() {
                if isomorphic_with_cap(&ds[i], &ds[j], 12).unwrap() {
                    iso_pairs.push((subsets[i].to_string(), subsets[j].to_string()));
                }
            }
        }
        // Only {2,4} and {3,4} coincide: with the pendant v4 on the end vertex
        // ℓ4 the path is effectively ℓ0..ℓ4 v4, and its reflection carries a
        // pendant at 2 onto a pendant at 3.
        assert_eq!(iso_pairs, vec![("{2,4}".to_string(), "{3,4}".to_string())]);
    }

    #[test]
    fn schutz_pair_small() {
        let sp = schutz_pair(&complete_graph(2), &[set(&[2])], 1, &SchutzCaps::default()).unwrap();
        assert_eq!(sp.e_star.len(), 2 + 6 + 4);
        for (u, v) in sp.e_star.edges() {
            assert!(sp.e_zero.adjacent(&u, &v));
        }
    }
}
