//! Finite graphs, digraphs and bipartite graphs over named vertices.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};
use crate::finite_graph::name::VertexName;

pub type Part = u8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Simple undirected graph.
    Graph,
    /// Irreflexive relation; both `(u,v)` and `(v,u)` may be present.
    Digraph,
    /// Undirected graph with a fixed 2-colouring.
    Bipartite,
}

/// Read access shared by finite structures, lazy limits and oracles.
///
/// `adjacent(u, v)` is the arc relation: symmetric for graphs and bipartite
/// graphs, directed for digraphs.
pub trait Presentation: Send + Sync {
    fn kind(&self) -> Kind;
    fn contains(&self, v: &VertexName) -> bool;
    fn adjacent(&self, u: &VertexName, v: &VertexName) -> bool;
    fn part(&self, v: &VertexName) -> Option<Part>;
}

/// A finite structure. Vertices and adjacency are kept in sorted containers so
/// iteration order is canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    kind: Kind,
    vertices: BTreeSet<VertexName>,
    succ: BTreeMap<VertexName, BTreeSet<VertexName>>,
    pred: BTreeMap<VertexName, BTreeSet<VertexName>>,
    parts: BTreeMap<VertexName, Part>,
}

impl Structure {
    pub fn graph(
        vertices: impl IntoIterator<Item = VertexName>,
        edges: impl IntoIterator<Item = (VertexName, VertexName)>,
    ) -> Result<Self> {
        Self::build(Kind::Graph, vertices.into_iter().collect(), edges, BTreeMap::new())
    }

    pub fn digraph(
        vertices: impl IntoIterator<Item = VertexName>,
        arcs: impl IntoIterator<Item = (VertexName, VertexName)>,
    ) -> Result<Self> {
        Self::build(Kind::Digraph, vertices.into_iter().collect(), arcs, BTreeMap::new())
    }

    pub fn bipartite(
        parts: impl IntoIterator<Item = (VertexName, Part)>,
        edges: impl IntoIterator<Item = (VertexName, VertexName)>,
    ) -> Result<Self> {
        let parts: BTreeMap<_, _> = parts.into_iter().collect();
        let vertices: BTreeSet<VertexName> = parts.keys().cloned().collect();
        Self::build(Kind::Bipartite, vertices, edges, parts)
    }

    /// General constructor; `parts` is ignored unless `kind` is bipartite.
    pub fn build(
        kind: Kind,
        vertices: BTreeSet<VertexName>,
        pairs: impl IntoIterator<Item = (VertexName, VertexName)>,
        parts: BTreeMap<VertexName, Part>,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(ForgeError::EmptyVertexSet);
        }
        let parts = if kind == Kind::Bipartite {
            for v in &vertices {
                match parts.get(v) {
                    None => return Err(ForgeError::MissingPart(v.clone())),
                    Some(&p) if p > 1 => return Err(ForgeError::BadPart(p)),
                    _ => {}
                }
            }
            if let Some(v) = parts.keys().find(|v| !vertices.contains(*v)) {
                return Err(ForgeError::UnknownVertex(v.clone()));
            }
            parts
        } else {
            BTreeMap::new()
        };
        let mut s = Structure {
            kind,
            succ: vertices.iter().map(|v| (v.clone(), BTreeSet::new())).collect(),
            pred: vertices.iter().map(|v| (v.clone(), BTreeSet::new())).collect(),
            vertices,
            parts,
        };
        for (u, v) in pairs {
            s.insert_pair(u, v)?;
        }
        Ok(s)
    }

    fn insert_pair(&mut self, u: VertexName, v: VertexName) -> Result<()> {
        for x in [&u, &v] {
            if !self.vertices.contains(x) {
                return Err(ForgeError::UnknownVertex(x.clone()));
            }
        }
        if u == v {
            return Err(ForgeError::Loop(u));
        }
        if self.kind == Kind::Bipartite && self.parts[&u] == self.parts[&v] {
            return Err(ForgeError::SamePartEdge(u, v));
        }
        self.succ.get_mut(&u).unwrap().insert(v.clone());
        self.pred.get_mut(&v).unwrap().insert(u.clone());
        if self.kind != Kind::Digraph {
            self.succ.get_mut(&v).unwrap().insert(u.clone());
            self.pred.get_mut(&u).unwrap().insert(v);
        }
        Ok(())
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn vertices(&self) -> &BTreeSet<VertexName> {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Always false: empty structures cannot be built.
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: &VertexName) -> bool {
        self.vertices.contains(v)
    }

    pub fn adjacent(&self, u: &VertexName, v: &VertexName) -> bool {
        self.succ.get(u).is_some_and(|s| s.contains(v))
    }

    /// Out-neighbours (all neighbours for undirected kinds).
    pub fn neighbors(&self, v: &VertexName) -> &BTreeSet<VertexName> {
        &self.succ[v]
    }

    pub fn in_neighbors(&self, v: &VertexName) -> &BTreeSet<VertexName> {
        &self.pred[v]
    }

    pub fn part(&self, v: &VertexName) -> Option<Part> {
        self.parts.get(v).copied()
    }

    pub fn parts(&self) -> &BTreeMap<VertexName, Part> {
        &self.parts
    }

    pub fn part_members(&self, p: Part) -> BTreeSet<VertexName> {
        self.parts.iter().filter(|(_, &q)| q == p).map(|(v, _)| v.clone()).collect()
    }

    /// Edges with `u < v` for undirected kinds; all arcs for digraphs.
    pub fn edges(&self) -> Vec<(VertexName, VertexName)> {
        let mut out = Vec::new();
        for (u, ns) in &self.succ {
            for v in ns {
                if self.kind == Kind::Digraph || u < v {
                    out.push((u.clone(), v.clone()));
                }
            }
        }
        out
    }

    /// Every ordered adjacent pair; each undirected edge appears twice.
    pub fn arcs(&self) -> impl Iterator<Item = (&VertexName, &VertexName)> + '_ {
        self.succ.iter().flat_map(|(u, ns)| ns.iter().map(move |v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        let arcs: usize = self.succ.values().map(BTreeSet::len).sum();
        if self.kind == Kind::Digraph {
            arcs
        } else {
            arcs / 2
        }
    }

    /// Renames every vertex; `f` must be injective on the vertex set.
    pub fn relabel(&self, f: impl Fn(&VertexName) -> VertexName) -> Result<Structure> {
        let map: BTreeMap<_, _> = self.vertices.iter().map(|v| (v.clone(), f(v))).collect();
        let image: BTreeSet<_> = map.values().cloned().collect();
        if image.len() != map.len() {
            return Err(ForgeError::Invalid("relabelling is not injective".into()));
        }
        let parts = self.parts.iter().map(|(v, p)| (map[v].clone(), *p)).collect();
        let pairs = self.edges().into_iter().map(|(u, v)| (map[&u].clone(), map[&v].clone()));
        Structure::build(self.kind, image, pairs, parts)
    }

    pub(crate) fn dense(&self) -> Dense {
        Dense::from_presentation(self, self.vertices.iter().cloned().collect())
    }
}

impl Presentation for Structure {
    fn kind(&self) -> Kind {
        self.kind
    }
    fn contains(&self, v: &VertexName) -> bool {
        Structure::contains(self, v)
    }
    fn adjacent(&self, u: &VertexName, v: &VertexName) -> bool {
        Structure::adjacent(self, u, v)
    }
    fn part(&self, v: &VertexName) -> Option<Part> {
        Structure::part(self, v)
    }
}

/// Index-based copy of a structure for the brute-force searches.
#[derive(Clone, Debug)]
pub(crate) struct Dense {
    pub kind: Kind,
    pub names: Vec<VertexName>,
    pub index: HashMap<VertexName, usize>,
    pub adj: Vec<Vec<bool>>,
    pub part: Vec<Part>,
}

impl Dense {
    pub fn from_presentation(p: &(impl Presentation + ?Sized), names: Vec<VertexName>) -> Dense {
        let n = names.len();
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    adj[i][j] = p.adjacent(&names[i], &names[j]);
                }
            }
        }
        let part = names.iter().map(|v| p.part(v).unwrap_or(0)).collect();
        let index = names.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        Dense { kind: p.kind(), names, index, adj, part }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.adj[i].iter().filter(|&&b| b).count()
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.adj.iter().filter(|row| row[i]).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(i: u32) -> VertexName {
        VertexName::seed(i)
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Structure::graph(Vec::new(), Vec::new()),
            Err(ForgeError::EmptyVertexSet)
        ));
        assert!(matches!(Structure::graph([s(0)], [(s(0), s(0))]), Err(ForgeError::Loop(_))));
        assert!(matches!(
            Structure::graph([s(0)], [(s(0), s(1))]),
            Err(ForgeError::UnknownVertex(_))
        ));
        assert!(matches!(
            Structure::bipartite([(s(0), 0), (s(1), 0)], [(s(0), s(1))]),
            Err(ForgeError::SamePartEdge(..))
        ));
    }

    #[test]
    fn undirected_edges_are_symmetric() {
        let g = Structure::graph([s(0), s(1), s(2)], [(s(1), s(0))]).unwrap();
        assert!(g.adjacent(&s(0), &s(1)) && g.adjacent(&s(1), &s(0)));
        assert_eq!(g.edges(), vec![(s(0), s(1))]);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn digraph_arcs_are_directed() {
        let d = Structure::digraph([s(0), s(1)], [(s(0), s(1))]).unwrap();
        assert!(d.adjacent(&s(0), &s(1)));
        assert!(!d.adjacent(&s(1), &s(0)));
        assert_eq!(d.in_neighbors(&s(1)).len(), 1);
    }
}
