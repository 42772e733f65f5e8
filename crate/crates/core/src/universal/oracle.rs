//! Lazily presented structures that can produce witnesses on demand.

use std::collections::BTreeSet;
use std::fmt;

use crate::constructions::IndexSet;
use crate::error::{ForgeError, Result};
use crate::finite_graph::{Kind, Part, Presentation, Structure, VertexName};

/// Constraints on a single vertex `w`.
///
/// `out`: arcs `w -> x` required; `inc`: arcs `x -> w` required; `not_out` and
/// `not_inc` forbid them. For undirected kinds only `out` and `not_out` matter.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Requirement {
    pub out: BTreeSet<VertexName>,
    pub inc: BTreeSet<VertexName>,
    pub not_out: BTreeSet<VertexName>,
    pub not_inc: BTreeSet<VertexName>,
    pub part: Option<Part>,
    pub exclude: BTreeSet<VertexName>,
}

impl Requirement {
    /// Adjacent to every vertex of `set` (both directions for digraphs).
    pub fn joined_to(kind: Kind, set: BTreeSet<VertexName>) -> Self {
        let inc = if kind == Kind::Digraph { set.clone() } else { BTreeSet::new() };
        Requirement { out: set, inc, ..Default::default() }
    }

    /// Adjacent to all of `u`, to none of `v`, and outside both.
    pub fn extension(kind: Kind, u: &BTreeSet<VertexName>, v: &BTreeSet<VertexName>) -> Self {
        let mut r = Requirement::joined_to(kind, u.clone());
        r.not_out = v.clone();
        if kind == Kind::Digraph {
            r.not_inc = v.clone();
        }
        r.exclude = u.union(v).cloned().collect();
        r
    }

    /// Exact digraph pattern: `w -> a`, `b -> w`, both ways with `c`, neither with `none`.
    pub fn digraph_pattern(
        a: &BTreeSet<VertexName>,
        b: &BTreeSet<VertexName>,
        c: &BTreeSet<VertexName>,
        none: &BTreeSet<VertexName>,
    ) -> Self {
        let union = |x: &BTreeSet<VertexName>, y: &BTreeSet<VertexName>| x.union(y).cloned().collect();
        Requirement {
            out: union(a, c),
            inc: union(b, c),
            not_out: union(b, none),
            not_inc: union(a, none),
            part: None,
            exclude: a.iter().chain(b).chain(c).chain(none).cloned().collect(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.not_out.is_empty() && self.not_inc.is_empty() && self.exclude.is_empty()
    }

    /// All vertices the requirement mentions positively.
    pub fn positives(&self) -> BTreeSet<VertexName> {
        self.out.union(&self.inc).cloned().collect()
    }

    pub fn mentioned(&self) -> impl Iterator<Item = &VertexName> {
        self.out.iter().chain(&self.inc).chain(&self.not_out).chain(&self.not_inc)
    }

    pub fn holds(&self, p: &(impl Presentation + ?Sized), w: &VertexName) -> bool {
        if self.exclude.contains(w) {
            return false;
        }
        if let Some(part) = self.part {
            if p.part(w) != Some(part) {
                return false;
            }
        }
        self.out.iter().all(|x| p.adjacent(w, x))
            && self.inc.iter().all(|x| p.adjacent(x, w))
            && !self.not_out.iter().any(|x| p.adjacent(w, x))
            && !self.not_inc.iter().any(|x| p.adjacent(x, w))
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |s: &BTreeSet<VertexName>| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "out {{{}}}", show(&self.out))?;
        if !self.inc.is_empty() {
            write!(f, " in {{{}}}", show(&self.inc))?;
        }
        if !self.not_out.is_empty() {
            write!(f, " not-out {{{}}}", show(&self.not_out))?;
        }
        if !self.not_inc.is_empty() {
            write!(f, " not-in {{{}}}", show(&self.not_inc))?;
        }
        if let Some(p) = self.part {
            write!(f, " part {p}")?;
        }
        Ok(())
    }
}

/// A countable structure with a vertex enumeration and a witness function.
pub trait AcOracle: Presentation {
    /// The first `limit` vertices in enumeration order.
    fn enumerate(&self, limit: usize) -> Vec<VertexName>;

    /// Number of vertices, if finite.
    fn size(&self) -> Option<usize>;

    /// The `j`-th vertex (from 0) satisfying `req`, if any.
    fn witness(&self, req: &Requirement, j: usize) -> Option<VertexName>;

    /// How many vertices satisfy `req`; `None` means unboundedly many.
    fn multiplicity(&self, req: &Requirement) -> Option<usize>;
}

/// Finite structures answer witness queries by scanning in name order.
impl AcOracle for Structure {
    fn enumerate(&self, limit: usize) -> Vec<VertexName> {
        self.vertices().iter().take(limit).cloned().collect()
    }

    fn size(&self) -> Option<usize> {
        Some(self.len())
    }

    fn witness(&self, req: &Requirement, j: usize) -> Option<VertexName> {
        self.vertices().iter().filter(|w| req.holds(self, w)).nth(j).cloned()
    }

    fn multiplicity(&self, req: &Requirement) -> Option<usize> {
        Some(self.vertices().iter().filter(|w| req.holds(self, w)).count())
    }
}

/// Membership rule for an infinite index set: a finite part plus an optional
/// periodic tail `{n >= start : n mod period in residues}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexRule {
    pub finite: IndexSet,
    pub tail: Option<(u64, u64, BTreeSet<u64>)>,
}

impl IndexRule {
    pub fn finite(s: IndexSet) -> Self {
        IndexRule { finite: s, tail: None }
    }

    pub fn periodic(finite: IndexSet, start: u64, period: u64, residues: BTreeSet<u64>) -> Result<Self> {
        if period == 0 || start < 2 {
            return Err(ForgeError::Invalid("periodic tail needs period > 0 and start >= 2".into()));
        }
        Ok(IndexRule { finite, tail: Some((start, period, residues)) })
    }

    pub fn contains(&self, n: u64) -> bool {
        self.finite.contains(n)
            || self.tail.as_ref().is_some_and(|(start, period, res)| n >= *start && res.contains(&(n % period)))
    }
}

/// The complement of `g ∪̇ L_S` with `L_S` the full infinite path and pendants.
#[derive(Clone, Debug)]
pub struct DeltaOracle {
    g: Structure,
    s: IndexRule,
    wrap: bool,
}

impl DeltaOracle {
    fn l_name(&self, pendant: bool, n: u64) -> VertexName {
        let base = VertexName::gadget(if pendant { "v" } else { "l" }, n as u32);
        if self.wrap {
            VertexName::gadget_over("lam", 0, vec![base])
        } else {
            base
        }
    }

    /// `(is_pendant, index)` for a name of the L part.
    fn l_index(&self, v: &VertexName) -> Option<(bool, u64)> {
        let inner = if self.wrap {
            match v {
                VertexName::Gadget { parents, label, index: 0 } if label == "lam" && parents.len() == 1 => &parents[0],
                _ => return None,
            }
        } else {
            v
        };
        match inner {
            VertexName::Gadget { parents, label, index } if parents.is_empty() => match label.as_str() {
                "l" => Some((false, *index as u64)),
                "v" if self.s.contains(*index as u64) => Some((true, *index as u64)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn ell(&self, n: u64) -> VertexName {
        self.l_name(false, n)
    }

    pub fn base(&self) -> &Structure {
        &self.g
    }
}

/// Oracle for the complement of `g ∪̇ L_S`.
pub fn lazy_delta(g: &Structure, s: IndexRule) -> Result<DeltaOracle> {
    if g.kind() != Kind::Graph {
        return Err(ForgeError::KindMismatch { expected: Kind::Graph, found: g.kind() });
    }
    let mut o = DeltaOracle { g: g.clone(), s, wrap: false };
    if g.vertices().iter().any(|v| o.l_index(v).is_some() || matches!(v, VertexName::Gadget { label, .. } if label == "l" || label == "v")) {
        o.wrap = true;
    }
    Ok(o)
}

impl Presentation for DeltaOracle {
    fn kind(&self) -> Kind {
        Kind::Graph
    }

    fn contains(&self, v: &VertexName) -> bool {
        self.g.contains(v) || self.l_index(v).is_some()
    }

    fn adjacent(&self, u: &VertexName, v: &VertexName) -> bool {
        if u == v {
            return false;
        }
        match (self.g.contains(u), self.g.contains(v)) {
            (true, true) => !self.g.adjacent(u, v),
            (true, false) => self.l_index(v).is_some(),
            (false, true) => self.l_index(u).is_some(),
            (false, false) => match (self.l_index(u), self.l_index(v)) {
                (Some((pu, a)), Some((pv, b))) => {
                    let joined_in_l = match (pu, pv) {
                        (false, false) => a.abs_diff(b) == 1,
                        (false, true) | (true, false) => a == b,
                        (true, true) => false,
                    };
                    !joined_in_l
                }
                _ => false,
            },
        }
    }

    fn part(&self, _v: &VertexName) -> Option<Part> {
        None
    }
}

impl AcOracle for DeltaOracle {
    fn enumerate(&self, limit: usize) -> Vec<VertexName> {
        let mut out: Vec<VertexName> = self.g.vertices().iter().take(limit).cloned().collect();
        let mut n = 0;
        while out.len() < limit {
            out.push(self.l_name(false, n));
            if out.len() < limit && self.s.contains(n) {
                out.push(self.l_name(true, n));
            }
            n += 1;
        }
        out
    }

    fn size(&self) -> Option<usize> {
        None
    }

    /// Positive requirements get `ℓ_{start+j}`, where `start` is two past the
    /// largest L index mentioned (0 if none). Other requirements are answered
    /// by scanning a window of the enumeration.
    fn witness(&self, req: &Requirement, j: usize) -> Option<VertexName> {
        if req.part.is_some() {
            return None;
        }
        let reach = req.mentioned().filter_map(|v| self.l_index(v)).map(|(_, n)| n).max();
        let start = reach.map_or(0, |n| n + 2);
        if req.is_positive() {
            let w = self.l_name(false, start + j as u64);
            return req.holds(self, &w).then_some(w);
        }
        let window = self.g.len() + 2 * (start as usize + j + 2);
        self.enumerate(window).into_iter().filter(|w| req.holds(self, w)).nth(j)
    }

    fn multiplicity(&self, req: &Requirement) -> Option<usize> {
        if req.is_positive() && req.part.is_none() {
            None
        } else {
            let reach = req.mentioned().filter_map(|v| self.l_index(v)).map(|(_, n)| n).max().unwrap_or(0);
            let window = self.g.len() + 2 * (reach as usize + 4);
            Some(self.enumerate(window).iter().filter(|w| req.holds(self, w)).count())
        }
    }
}
