//! Vertex maps between structures and the checks that classify them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::finite_graph::name::VertexName;
use crate::finite_graph::ops::induced;
use crate::finite_graph::structure::{Kind, Part, Presentation, Structure};

/// A finite map on vertex names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexMap(pub BTreeMap<VertexName, VertexName>);

impl VertexMap {
    pub fn identity(g: &Structure) -> Self {
        VertexMap(g.vertices().iter().map(|v| (v.clone(), v.clone())).collect())
    }

    pub fn get(&self, v: &VertexName) -> Option<&VertexName> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: VertexName, w: VertexName) {
        self.0.insert(v, w);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexName, &VertexName)> {
        self.0.iter()
    }

    pub fn image_set(&self) -> BTreeSet<VertexName> {
        self.0.values().cloned().collect()
    }

    pub fn is_injective(&self) -> bool {
        self.image_set().len() == self.0.len()
    }

    /// `self` followed by `then`. Vertices whose image `then` does not cover are dropped.
    pub fn then(&self, then: &VertexMap) -> VertexMap {
        VertexMap(
            self.0
                .iter()
                .filter_map(|(v, w)| then.get(w).map(|x| (v.clone(), x.clone())))
                .collect(),
        )
    }
}

impl FromIterator<(VertexName, VertexName)> for VertexMap {
    fn from_iter<I: IntoIterator<Item = (VertexName, VertexName)>>(iter: I) -> Self {
        VertexMap(iter.into_iter().collect())
    }
}

/// Checks that `f` is total on `domain`, lands in `codomain`, sends arcs to
/// arcs, and for bipartite kinds sends each part into a single part.
pub fn check_homomorphism(
    f: &VertexMap,
    domain: &Structure,
    codomain: &(impl Presentation + ?Sized),
) -> bool {
    homomorphism_defect(f, domain, codomain).is_none()
}

/// Like [`check_homomorphism`], returning a description of the first defect.
pub fn homomorphism_defect(
    f: &VertexMap,
    domain: &Structure,
    codomain: &(impl Presentation + ?Sized),
) -> Option<String> {
    if domain.kind() != codomain.kind() {
        return Some(format!("kinds differ: {:?} vs {:?}", domain.kind(), codomain.kind()));
    }
    for v in domain.vertices() {
        match f.get(v) {
            None => return Some(format!("{v} is unassigned")),
            Some(w) if !codomain.contains(w) => {
                return Some(format!("{v} maps to {w}, outside the codomain"))
            }
            _ => {}
        }
    }
    for (u, v) in domain.arcs() {
        let (fu, fv) = (&f.0[u], &f.0[v]);
        if !codomain.adjacent(fu, fv) {
            return Some(format!("arc {u} -> {v} maps to non-arc {fu} -> {fv}"));
        }
    }
    if domain.kind() == Kind::Bipartite {
        let mut target: [Option<Part>; 2] = [None, None];
        for (v, &p) in domain.parts() {
            let q = codomain.part(&f.0[v]);
            match (target[p as usize], q) {
                (_, None) => return Some(format!("image of {v} has no part")),
                (None, q) => target[p as usize] = q,
                (Some(t), Some(q)) if t != q => {
                    return Some(format!("part {p} is split across both target parts"))
                }
                _ => {}
            }
        }
    }
    None
}

/// Injective homomorphism that also reflects arcs (and the part relation).
pub fn check_embedding(
    f: &VertexMap,
    domain: &Structure,
    codomain: &(impl Presentation + ?Sized),
) -> bool {
    if !check_homomorphism(f, domain, codomain) {
        return false;
    }
    let images: BTreeSet<_> = domain.vertices().iter().map(|v| &f.0[v]).collect();
    if images.len() != domain.len() {
        return false;
    }
    for u in domain.vertices() {
        for v in domain.vertices() {
            if u == v {
                continue;
            }
            let (fu, fv) = (&f.0[u], &f.0[v]);
            if domain.adjacent(u, v) != codomain.adjacent(fu, fv) {
                return false;
            }
            if domain.kind() == Kind::Bipartite
                && (domain.part(u) == domain.part(v)) != (codomain.part(fu) == codomain.part(fv))
            {
                return false;
            }
        }
    }
    true
}

/// Kernel classes of `f` on the domain, each sorted, listed by least element.
pub fn kernel(f: &VertexMap, domain: &Structure) -> Vec<BTreeSet<VertexName>> {
    kernel_of(f, domain.vertices().iter())
}

pub(crate) fn kernel_of<'a>(
    f: &VertexMap,
    vertices: impl Iterator<Item = &'a VertexName>,
) -> Vec<BTreeSet<VertexName>> {
    let mut by_image: BTreeMap<&VertexName, BTreeSet<VertexName>> = BTreeMap::new();
    for v in vertices {
        if let Some(w) = f.get(v) {
            by_image.entry(w).or_default().insert(v.clone());
        }
    }
    let mut classes: Vec<_> = by_image.into_values().collect();
    classes.sort_by(|a, b| a.first().cmp(&b.first()));
    classes
}

/// The image of a map compared with the substructure induced on its vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageReport {
    pub vertices: BTreeSet<VertexName>,
    /// `{(f u, f v)}` over domain arcs, listed in the same orientation as `Structure::edges`.
    pub edge_image: BTreeSet<(VertexName, VertexName)>,
    pub induced: Structure,
    /// True when the edge image is all of the induced edges and, for bipartite
    /// kinds, the image of the part relation is the induced part relation.
    pub equal: bool,
}

pub fn image(f: &VertexMap, domain: &Structure, codomain: &Structure) -> Result<ImageReport> {
    let vertices: BTreeSet<_> = domain.vertices().iter().filter_map(|v| f.get(v).cloned()).collect();
    let induced = induced(codomain, &vertices)?;
    let undirected = domain.kind() != Kind::Digraph;
    let mut edge_image = BTreeSet::new();
    for (u, v) in domain.arcs() {
        let (a, b) = (f.0[u].clone(), f.0[v].clone());
        if !undirected || a < b {
            edge_image.insert((a, b));
        }
    }
    let mut equal = edge_image == induced.edges().into_iter().collect();
    if equal && domain.kind() == Kind::Bipartite {
        let mut same_part_image = BTreeSet::new();
        for u in domain.vertices() {
            for v in domain.vertices() {
                if domain.part(u) == domain.part(v) && f.0[u] != f.0[v] {
                    same_part_image.insert((f.0[u].clone(), f.0[v].clone()));
                }
            }
        }
        for a in &vertices {
            for b in &vertices {
                if a != b
                    && induced.part(a) == induced.part(b)
                    && !same_part_image.contains(&(a.clone(), b.clone()))
                {
                    equal = false;
                }
            }
        }
    }
    Ok(ImageReport { vertices, edge_image, induced, equal })
}
