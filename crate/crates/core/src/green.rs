//! Exhaustive endomorphism monoids of small structures and their Green's relations.
//!
//! Elements are stored as image vectors over the sorted vertex list and are
//! sorted lexicographically. Products act on the right: `mul(a, b)` applies
//! `a` first.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{ForgeError, Result};
use crate::finite_graph::structure::Dense;
use crate::finite_graph::{automorphisms_with_cap, image, isomorphic_with_cap, Kind, Structure, VertexMap, VertexName};

pub const DEFAULT_VERTEX_CAP: usize = 7;
pub const DEFAULT_ELEMENT_CAP: usize = 1 << 12;
const COUNTEREXAMPLE_LIMIT: usize = 5;

#[derive(Clone, Debug)]
pub struct FiniteMonoid {
    structure: Structure,
    dense: Dense,
    elements: Vec<Vec<u8>>,
    lookup: HashMap<Vec<u8>, u32>,
    mul: Vec<u32>,
    identity: usize,
}

pub fn enumerate_endos(g: &Structure) -> Result<FiniteMonoid> {
    enumerate_endos_with_caps(g, DEFAULT_VERTEX_CAP, DEFAULT_ELEMENT_CAP)
}

/// All endomorphisms of `g`, refusing structures with more than `vertex_cap`
/// vertices or monoids with more than `element_cap` elements.
pub fn enumerate_endos_with_caps(g: &Structure, vertex_cap: usize, element_cap: usize) -> Result<FiniteMonoid> {
    let n = g.len();
    if n > vertex_cap || n > u8::MAX as usize {
        return Err(ForgeError::CapExceeded { what: "endomorphism enumeration vertices".into(), size: n as u128, cap: vertex_cap.min(255) as u128 });
    }
    let d = g.dense();
    let mut elements = Vec::new();
    let mut f = vec![0u8; n];
    let mut part_map: [Option<u8>; 2] = [None, None];
    search(&d, 0, &mut f, &mut part_map, &mut elements, element_cap)?;
    let lookup: HashMap<Vec<u8>, u32> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i as u32)).collect();
    let id: Vec<u8> = (0..n as u8).collect();
    let identity = *lookup
        .get(&id)
        .ok_or_else(|| ForgeError::Invalid("identity missing from the endomorphism list".into()))? as usize;
    let m = elements.len();
    let mut mul = vec![0u32; m * m];
    let mut prod = vec![0u8; n];
    for a in 0..m {
        for b in 0..m {
            for x in 0..n {
                prod[x] = elements[b][elements[a][x] as usize];
            }
            mul[a * m + b] = *lookup
                .get(&prod)
                .ok_or_else(|| ForgeError::Invalid("endomorphisms are not closed under composition".into()))?;
        }
    }
    Ok(FiniteMonoid { structure: g.clone(), dense: d, elements, lookup, mul, identity })
}

fn search(
    d: &Dense,
    i: usize,
    f: &mut Vec<u8>,
    part_map: &mut [Option<u8>; 2],
    out: &mut Vec<Vec<u8>>,
    cap: usize,
) -> Result<()> {
    let n = d.len();
    if i == n {
        if out.len() >= cap {
            return Err(ForgeError::CapExceeded { what: "endomorphism monoid size".into(), size: out.len() as u128 + 1, cap: cap as u128 });
        }
        out.push(f.clone());
        return Ok(());
    }
    for t in 0..n {
        let ok = (0..i).all(|j| {
            let fj = f[j] as usize;
            (!d.adj[i][j] || d.adj[t][fj]) && (!d.adj[j][i] || d.adj[fj][t])
        });
        if !ok {
            continue;
        }
        let bip = d.kind == Kind::Bipartite;
        let p = d.part[i] as usize;
        let prev = part_map[p];
        if bip {
            match prev {
                Some(q) if q != d.part[t] => continue,
                _ => part_map[p] = Some(d.part[t]),
            }
        }
        f[i] = t as u8;
        search(d, i + 1, f, part_map, out, cap)?;
        if bip {
            part_map[p] = prev;
        }
    }
    Ok(())
}

impl FiniteMonoid {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// `a` then `b`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.len() + b] as usize
    }

    pub fn element(&self, i: usize) -> &[u8] {
        &self.elements[i]
    }

    pub fn to_map(&self, i: usize) -> VertexMap {
        self.elements[i]
            .iter()
            .enumerate()
            .map(|(x, &y)| (self.dense.names[x].clone(), self.dense.names[y as usize].clone()))
            .collect()
    }

    pub fn index_of(&self, f: &VertexMap) -> Option<usize> {
        let mut v = Vec::with_capacity(self.dense.len());
        for name in &self.dense.names {
            let w = f.get(name)?;
            v.push(*self.dense.index.get(w)? as u8);
        }
        self.lookup.get(&v).map(|&i| i as usize)
    }

    pub fn is_idempotent(&self, a: usize) -> bool {
        self.mul(a, a) == a
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len()).filter(|&a| self.is_idempotent(a)).collect()
    }

    /// Some `g` with `f g f = f`, trying `f` itself first.
    pub fn is_regular(&self, f: usize) -> Option<usize> {
        std::iter::once(f).chain(0..self.len()).find(|&g| self.mul(self.mul(f, g), f) == f)
    }

    /// Image as a set of vertex positions.
    pub fn image_set(&self, a: usize) -> BTreeSet<u8> {
        self.elements[a].iter().copied().collect()
    }

    /// Kernel as canonical labels: each vertex gets the index of the first vertex with the same image.
    pub fn kernel_labels(&self, a: usize) -> Vec<u8> {
        let e = &self.elements[a];
        (0..e.len()).map(|x| (0..=x).find(|&y| e[y] == e[x]).unwrap() as u8).collect()
    }

    pub fn rank(&self, a: usize) -> usize {
        self.image_set(a).len()
    }

    fn names_of(&self, s: &BTreeSet<u8>) -> BTreeSet<VertexName> {
        s.iter().map(|&x| self.dense.names[x as usize].clone()).collect()
    }

    /// Induced substructure on the image of `a`.
    pub fn induced_image(&self, a: usize) -> Result<Structure> {
        crate::finite_graph::induced(&self.structure, &self.names_of(&self.image_set(a)))
    }
}

type Bits = Vec<u64>;

fn bits(n: usize) -> Bits {
    vec![0; n.div_ceil(64)]
}

fn set_bit(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn has_bit(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreenData {
    pub l: Vec<usize>,
    pub r: Vec<usize>,
    pub h: Vec<usize>,
    pub d: Vec<usize>,
    pub j: Vec<usize>,
    pub idempotent: Vec<bool>,
    pub regular: Vec<bool>,
}

impl GreenData {
    pub fn class_count(classes: &[usize]) -> usize {
        classes.iter().max().map_or(0, |m| m + 1)
    }

    /// Members of H-class `h`, in element order.
    pub fn h_class(&self, h: usize) -> Vec<usize> {
        (0..self.h.len()).filter(|&x| self.h[x] == h).collect()
    }
}

/// Numbers classes by least member: `same(a, b)` for `b < a` decides membership.
fn number_classes(n: usize, same: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut reps: Vec<usize> = Vec::new();
    let mut out = vec![0; n];
    for a in 0..n {
        match reps.iter().position(|&r| same(r, a)) {
            Some(c) => out[a] = c,
            None => {
                out[a] = reps.len();
                reps.push(a);
            }
        }
    }
    out
}

pub fn green_relations(m: &FiniteMonoid) -> GreenData {
    let n = m.len();
    let mut right = vec![bits(n); n];
    let mut left = vec![bits(n); n];
    for a in 0..n {
        for x in 0..n {
            set_bit(&mut right[a], m.mul(a, x));
            set_bit(&mut left[a], m.mul(x, a));
        }
    }
    let mut two = vec![bits(n); n];
    for a in 0..n {
        for x in 0..n {
            if has_bit(&left[a], x) {
                for (t, w) in two[a].iter_mut().zip(&right[x]) {
                    *t |= w;
                }
            }
        }
    }
    let l = number_classes(n, |a, b| left[a] == left[b]);
    let r = number_classes(n, |a, b| right[a] == right[b]);
    let j = number_classes(n, |a, b| two[a] == two[b]);
    let h = number_classes(n, |a, b| l[a] == l[b] && r[a] == r[b]);
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    let mut first_l: HashMap<usize, usize> = HashMap::new();
    let mut first_r: HashMap<usize, usize> = HashMap::new();
    for a in 0..n {
        for rep in [*first_l.entry(l[a]).or_insert(a), *first_r.entry(r[a]).or_insert(a)] {
            let (x, y) = (find(&mut uf, a), find(&mut uf, rep));
            uf[x.max(y)] = x.min(y);
        }
    }
    let roots: Vec<usize> = (0..n).map(|a| find(&mut uf, a)).collect();
    let d = number_classes(n, |a, b| roots[a] == roots[b]);
    let idempotent = (0..n).map(|a| m.is_idempotent(a)).collect();
    let regular = (0..n).map(|a| m.is_regular(a).is_some()).collect();
    GreenData { l, r, h, d, j, idempotent, regular }
}

/// The H-class of an idempotent as a group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupTable {
    pub elements: Vec<usize>,
    pub identity: usize,
    /// Positions into `elements`.
    pub table: Vec<Vec<usize>>,
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

pub fn maximal_subgroup(m: &FiniteMonoid, g: &GreenData, e: usize) -> Result<GroupTable> {
    if !m.is_idempotent(e) {
        return Err(ForgeError::Invalid(format!("element {e} is not idempotent")));
    }
    let elements = g.h_class(g.h[e]);
    let pos: HashMap<usize, usize> = elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut table = Vec::with_capacity(elements.len());
    for &a in &elements {
        let mut row = Vec::with_capacity(elements.len());
        for &b in &elements {
            let p = pos.get(&m.mul(a, b)).ok_or_else(|| ForgeError::Invalid("H-class is not closed".into()))?;
            row.push(*p);
        }
        table.push(row);
    }
    let id = pos[&e];
    for (i, row) in table.iter().enumerate() {
        if row[id] != i || table[id][i] != i || !row.contains(&id) {
            return Err(ForgeError::Invalid("H-class fails the group axioms".into()));
        }
    }
    Ok(GroupTable { elements, identity: id, table })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchutzGroup {
    pub h_class: Vec<usize>,
    /// Elements `t` with `H t ⊆ H`.
    pub stabiliser: Vec<usize>,
    /// Distinct permutations `h ↦ h t` of the H-class, as positions, sorted.
    pub permutations: Vec<Vec<usize>>,
}

impl SchutzGroup {
    pub fn order(&self) -> usize {
        self.permutations.len()
    }
}

/// Right Schützenberger group of the H-class containing `rep`.
pub fn schutzenberger(m: &FiniteMonoid, g: &GreenData, rep: usize) -> SchutzGroup {
    let h_class = g.h_class(g.h[rep]);
    let pos: HashMap<usize, usize> = h_class.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut stabiliser = Vec::new();
    let mut perms = BTreeSet::new();
    for t in 0..m.len() {
        let image: Option<Vec<usize>> = h_class.iter().map(|&h| pos.get(&m.mul(h, t)).copied()).collect();
        if let Some(p) = image {
            stabiliser.push(t);
            perms.insert(p);
        }
    }
    SchutzGroup { h_class, stabiliser, permutations: perms.into_iter().collect() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HCell {
    pub l_index: usize,
    pub r_index: usize,
    pub size: usize,
    pub is_group: bool,
    pub schutz_order: usize,
    pub members: Vec<VertexMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DClassBox {
    pub d_index: usize,
    pub regular: bool,
    pub rank: usize,
    pub h_classes: Vec<HCell>,
}

/// D-classes as lists of H-cells, each labelled by its L- and R-class.
pub fn eggbox(m: &FiniteMonoid, g: &GreenData) -> Vec<DClassBox> {
    let mut boxes: BTreeMap<usize, DClassBox> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for a in 0..m.len() {
        let entry = boxes.entry(g.d[a]).or_insert_with(|| DClassBox {
            d_index: g.d[a],
            regular: g.regular[a],
            rank: m.rank(a),
            h_classes: Vec::new(),
        });
        if !seen.insert(g.h[a]) {
            continue;
        }
        let members = g.h_class(g.h[a]);
        entry.h_classes.push(HCell {
            l_index: g.l[a],
            r_index: g.r[a],
            size: members.len(),
            is_group: members.iter().any(|&x| g.idempotent[x]),
            schutz_order: schutzenberger(m, g, a).order(),
            members: members.iter().map(|&x| m.to_map(x)).collect(),
        });
    }
    boxes.into_values().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub name: String,
    pub checked: usize,
    pub counterexamples: Vec<String>,
    pub violations: usize,
}

impl Claim {
    fn new(name: &str) -> Self {
        Claim { name: name.into(), checked: 0, counterexamples: Vec::new(), violations: 0 }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.counterexamples.len() < COUNTEREXAMPLE_LIMIT {
                self.counterexamples.push(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreenReport {
    pub vertices: usize,
    pub monoid_size: usize,
    pub claims: Vec<Claim>,
}

impl GreenReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(Claim::passed)
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }
}

/// Checks the relationship between Green's relations, images, kernels and
/// automorphism groups exhaustively on `End(g)`.
pub fn verify_green_structure(g: &Structure) -> Result<GreenReport> {
    verify_green_structure_with_caps(g, DEFAULT_VERTEX_CAP, DEFAULT_ELEMENT_CAP)
}

pub fn verify_green_structure_with_caps(g: &Structure, vertex_cap: usize, element_cap: usize) -> Result<GreenReport> {
    let m = enumerate_endos_with_caps(g, vertex_cap, element_cap)?;
    let gd = green_relations(&m);
    let n = m.len();
    let show = |a: usize| m.to_map(a).iter().map(|(x, y)| format!("{x}->{y}")).collect::<Vec<_>>().join(" ");

    let mut structural = Claim::new("h_is_meet_of_l_and_r");
    let mut d_in_j = Claim::new("d_refines_j");
    let mut idem_regular = Claim::new("idempotents_are_regular");
    let mut reg_on_d = Claim::new("regularity_constant_on_d_classes");
    let mut l_image = Claim::new("l_related_have_equal_images");
    let mut r_kernel = Claim::new("r_related_have_equal_kernels");
    let mut d_iso = Claim::new("d_related_have_isomorphic_images");
    let mut reg_l = Claim::new("regular_equal_images_are_l_related");
    let mut reg_r = Claim::new("regular_equal_kernels_are_r_related");
    let mut reg_d = Claim::new("regular_isomorphic_images_are_d_related");
    let mut reg_image = Claim::new("regular_image_is_induced");
    let mut group_aut = Claim::new("group_h_class_is_image_automorphism_group");
    let mut schutz_det = Claim::new("translations_determined_by_image_restriction");
    let mut schutz_aut = Claim::new("translations_restrict_to_image_automorphisms");
    let mut schutz_d = Claim::new("schutzenberger_order_constant_on_d_classes");
    let mut schutz_h = Claim::new("schutzenberger_order_matches_h_class");

    let images: Vec<BTreeSet<u8>> = (0..n).map(|a| m.image_set(a)).collect();
    let kernels: Vec<Vec<u8>> = (0..n).map(|a| m.kernel_labels(a)).collect();
    let mut iso_cache: HashMap<(BTreeSet<u8>, BTreeSet<u8>), bool> = HashMap::new();
    let mut iso = |a: &BTreeSet<u8>, b: &BTreeSet<u8>| -> Result<bool> {
        let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        if let Some(&v) = iso_cache.get(&key) {
            return Ok(v);
        }
        let sa = crate::finite_graph::induced(&m.structure, &m.names_of(a))?;
        let sb = crate::finite_graph::induced(&m.structure, &m.names_of(b))?;
        let v = isomorphic_with_cap(&sa, &sb, vertex_cap.max(sa.len()))?;
        iso_cache.insert(key, v);
        Ok(v)
    };

    for a in 0..n {
        if gd.idempotent[a] {
            idem_regular.check(gd.regular[a], || show(a));
        }
        for b in 0..n {
            let (lr, rr) = (gd.l[a] == gd.l[b], gd.r[a] == gd.r[b]);
            structural.check((gd.h[a] == gd.h[b]) == (lr && rr), || format!("{} / {}", show(a), show(b)));
            if gd.d[a] == gd.d[b] {
                d_in_j.check(gd.j[a] == gd.j[b], || format!("{} / {}", show(a), show(b)));
                reg_on_d.check(gd.regular[a] == gd.regular[b], || format!("{} / {}", show(a), show(b)));
                d_iso.check(iso(&images[a], &images[b])?, || format!("{} / {}", show(a), show(b)));
            }
            if lr {
                l_image.check(images[a] == images[b], || format!("{} / {}", show(a), show(b)));
            }
            if rr {
                r_kernel.check(kernels[a] == kernels[b], || format!("{} / {}", show(a), show(b)));
            }
            if gd.regular[a] && gd.regular[b] {
                if images[a] == images[b] {
                    reg_l.check(lr, || format!("{} / {}", show(a), show(b)));
                }
                if kernels[a] == kernels[b] {
                    reg_r.check(rr, || format!("{} / {}", show(a), show(b)));
                }
                if images[a].len() == images[b].len() && iso(&images[a], &images[b])? {
                    reg_d.check(gd.d[a] == gd.d[b], || format!("{} / {}", show(a), show(b)));
                }
            }
        }
        if gd.regular[a] {
            let rep = image(&m.to_map(a), &m.structure, &m.structure)?;
            reg_image.check(rep.equal, || show(a));
        }
    }

    let mut d_orders: HashMap<usize, usize> = HashMap::new();
    let mut done = BTreeSet::new();
    for a in 0..n {
        if !done.insert(gd.h[a]) {
            continue;
        }
        let sg = schutzenberger(&m, &gd, a);
        let hsize = sg.h_class.len();
        let is_group = sg.h_class.iter().any(|&x| gd.idempotent[x]);
        schutz_h.check(sg.order() == hsize && (!is_group || sg.order() == hsize), || {
            format!("H-class of {} has size {hsize} but group order {}", show(a), sg.order())
        });
        match d_orders.get(&gd.d[a]) {
            Some(&o) => schutz_d.check(o == sg.order(), || format!("D-class of {}: orders {o} and {}", show(a), sg.order())),
            None => {
                d_orders.insert(gd.d[a], sg.order());
            }
        }
        let vf: Vec<u8> = images[a].iter().copied().collect();
        let perm_of: HashMap<usize, Vec<usize>> = sg
            .stabiliser
            .iter()
            .map(|&t| (t, sg.h_class.iter().map(|&h| sg.h_class.iter().position(|&x| x == m.mul(h, t)).unwrap()).collect()))
            .collect();
        let restrict = |t: usize| -> Vec<u8> { vf.iter().map(|&x| m.element(t)[x as usize]).collect() };
        let induced_img = m.induced_image(a)?;
        let edge_img: BTreeSet<(u8, u8)> = {
            let e = m.element(a);
            let mut s = BTreeSet::new();
            for x in 0..e.len() {
                for y in 0..e.len() {
                    if m.dense.adj[x][y] {
                        s.insert((e[x], e[y]));
                    }
                }
            }
            s
        };
        for &s in &sg.stabiliser {
            let rs = restrict(s);
            let perm: VertexMap = vf
                .iter()
                .zip(&rs)
                .map(|(&x, &y)| (m.dense.names[x as usize].clone(), m.dense.names[y as usize].clone()))
                .collect();
            let is_perm = rs.iter().copied().collect::<BTreeSet<u8>>() == images[a];
            let keeps_edges = edge_img
                .iter()
                .map(|&(x, y)| (m.element(s)[x as usize], m.element(s)[y as usize]))
                .collect::<BTreeSet<_>>()
                == edge_img;
            schutz_aut.check(
                is_perm && crate::finite_graph::check_embedding(&perm, &induced_img, &induced_img) && keeps_edges,
                || format!("{} acting on the image of {}", show(s), show(a)),
            );
            for &t in &sg.stabiliser {
                let same_gamma = perm_of[&s] == perm_of[&t];
                schutz_det.check(same_gamma == (rs == restrict(t)), || format!("{} vs {} on {}", show(s), show(t), show(a)));
            }
        }
        if let Some(&e) = sg.h_class.iter().find(|&&x| gd.idempotent[x]) {
            let group = maximal_subgroup(&m, &gd, e)?;
            let auts = automorphisms_with_cap(&induced_img, induced_img.len())?;
            let restrictions: BTreeSet<VertexMap> = group
                .elements
                .iter()
                .map(|&h| {
                    vf.iter()
                        .map(|&x| (m.dense.names[x as usize].clone(), m.dense.names[m.element(h)[x as usize] as usize].clone()))
                        .collect()
                })
                .collect();
            let all_auts = restrictions.iter().all(|r| auts.contains(r));
            let hom = group.elements.iter().all(|&x| {
                group.elements.iter().all(|&y| {
                    let xy = m.mul(x, y);
                    vf.iter().all(|&v| m.element(xy)[v as usize] == m.element(y)[m.element(x)[v as usize] as usize])
                })
            });
            group_aut.check(
                group.order() == auts.len() && restrictions.len() == group.order() && all_auts && hom,
                || format!("idempotent {}: |H| = {}, |Aut| = {}", show(e), group.order(), auts.len()),
            );
        }
    }

    Ok(GreenReport {
        vertices: g.len(),
        monoid_size: n,
        claims: vec![
            structural, d_in_j, idem_regular, reg_on_d, l_image, r_kernel, d_iso, reg_l, reg_r, reg_d, reg_image, group_aut,
            schutz_det, schutz_aut, schutz_d, schutz_h,
        ],
    })
}
