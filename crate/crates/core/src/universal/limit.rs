use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use crate::error::{ForgeError, Result};
use crate::finite_graph::{Kind, Part, Presentation, Structure, VertexName};

use super::oracle::{AcOracle, Requirement};
use super::schedule::{Item, SubsetFamily, TripleFamily, MAX_RANKED};

/// Largest number of vertices `vertices_up_to` will materialise.
pub const MATERIALIZE_LIMIT: u128 = 1 << 22;
/// Largest number of scheduled items a single witness search may inspect.
pub const SEARCH_BUDGET: u64 = 1 << 24;
const ITEM_CACHE_LIMIT: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ScheduleMode {
    /// Every finite subset of the previous stage gets a new witness at every stage.
    #[default]
    Exact,
    /// Only subsets meeting the previous stage's new vertices are scheduled.
    Fresh,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagePlan {
    pub stages: u32,
    /// Largest subset (union, for digraphs) that receives a witness.
    pub subset_cap: Option<usize>,
    pub mode: ScheduleMode,
}

impl StagePlan {
    pub fn exact(stages: u32) -> Self {
        StagePlan { stages, subset_cap: None, mode: ScheduleMode::Exact }
    }

    pub fn capped(stages: u32, cap: usize, mode: ScheduleMode) -> Self {
        StagePlan { stages, subset_cap: Some(cap), mode }
    }
}

#[derive(Clone, Debug)]
enum Family {
    Subsets(SubsetFamily),
    Triples(TripleFamily),
    /// Block 0 holds subsets of part 0 (witnesses in part 1), block 1 the reverse.
    Parts([SubsetFamily; 2]),
}

#[derive(Clone, Debug)]
struct StageInfo {
    /// `|V_n|`, and per part for bipartite kinds.
    cum: u128,
    cum_part: [u128; 2],
    /// Witnesses added at this stage; zero for stage 0.
    total: u128,
    block0: u128,
    family: Option<Family>,
}

/// The union of the stages built from a seed by repeatedly adding witnesses,
/// answered lazily from vertex names.
pub struct LazyLimit {
    kind: Kind,
    seed: Arc<dyn AcOracle>,
    plan: StagePlan,
    prefix: Vec<VertexName>,
    prefix_rank: HashMap<VertexName, usize>,
    prefix_part: [Vec<VertexName>; 2],
    prefix_part_rank: HashMap<VertexName, usize>,
    info: Vec<StageInfo>,
    items: RwLock<HashMap<(u32, u64), Arc<Item>>>,
    layouts: Mutex<HashMap<u32, Arc<Vec<VertexName>>>>,
}

impl fmt::Debug for LazyLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyLimit")
            .field("kind", &self.kind)
            .field("plan", &self.plan)
            .field("seed_prefix", &self.prefix.len())
            .field("covered_stages", &self.covered())
            .finish()
    }
}

/// A limit over a finite seed.
pub fn limit(seed: &Structure, plan: StagePlan) -> Result<LazyLimit> {
    LazyLimit::new(Arc::new(seed.clone()), seed.len(), plan)
}

impl LazyLimit {
    /// A limit over an oracle seed. Stage 0 is the first `prefix_len` vertices
    /// of the oracle's enumeration; the rest of the oracle stays available for
    /// adjacency and as witness images.
    pub fn new(seed: Arc<dyn AcOracle>, prefix_len: usize, plan: StagePlan) -> Result<Self> {
        let mut prefix = seed.enumerate(prefix_len);
        if prefix.is_empty() {
            return Err(ForgeError::EmptyVertexSet);
        }
        prefix.sort();
        if let Some(v) = prefix.iter().find(|v| v.stage_rank() != 0) {
            return Err(ForgeError::Invalid(format!("seed vertex {v} has a witness-stage name")));
        }
        let kind = seed.kind();
        let prefix_rank = prefix.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let mut prefix_part: [Vec<VertexName>; 2] = [Vec::new(), Vec::new()];
        if kind == Kind::Bipartite {
            for v in &prefix {
                let p = seed.part(v).ok_or_else(|| ForgeError::MissingPart(v.clone()))?;
                prefix_part[p as usize].push(v.clone());
            }
        }
        let prefix_part_rank = prefix_part
            .iter()
            .flat_map(|vs| vs.iter().cloned().enumerate().map(|(i, v)| (v, i)))
            .collect();
        let mut lim = LazyLimit {
            kind,
            seed,
            plan,
            prefix_rank,
            prefix_part_rank,
            info: Vec::new(),
            prefix_part,
            prefix,
            items: RwLock::new(HashMap::new()),
            layouts: Mutex::new(HashMap::new()),
        };
        lim.plan_stages();
        Ok(lim)
    }

    fn plan_stages(&mut self) {
        let n0 = self.prefix.len() as u128;
        let parts0 = [self.prefix_part[0].len() as u128, self.prefix_part[1].len() as u128];
        self.info.push(StageInfo { cum: n0, cum_part: parts0, total: 0, block0: 0, family: None });
        for n in 1..=self.plan.stages {
            let prev = &self.info[n as usize - 1];
            let before = (n >= 2).then(|| &self.info[n as usize - 2]);
            let fresh = |cur: u128, old: Option<u128>| match self.plan.mode {
                ScheduleMode::Fresh => old.map(|o| o as usize),
                ScheduleMode::Exact => {
                    let _ = cur;
                    None
                }
            };
            let fam = |m: u128, old: Option<u128>| -> Option<SubsetFamily> {
                if m > MAX_RANKED as u128 {
                    return None;
                }
                let m = m as usize;
                Some(SubsetFamily { m, cap: self.plan.subset_cap.unwrap_or(m).min(m), fresh_from: fresh(m as u128, old) })
            };
            let (family, total, block0) = match self.kind {
                Kind::Graph => {
                    let Some(f) = fam(prev.cum, before.map(|b| b.cum)) else { break };
                    let Some(t) = f.total() else { break };
                    (Family::Subsets(f), t, 0)
                }
                Kind::Digraph => {
                    let Some(f) = fam(prev.cum, before.map(|b| b.cum)) else { break };
                    let f = TripleFamily(f);
                    let Some(t) = f.total() else { break };
                    (Family::Triples(f), t, 0)
                }
                Kind::Bipartite => {
                    let Some(f0) = fam(prev.cum_part[0], before.map(|b| b.cum_part[0])) else { break };
                    let Some(f1) = fam(prev.cum_part[1], before.map(|b| b.cum_part[1])) else { break };
                    let (Some(t0), Some(t1)) = (f0.total(), f1.total()) else { break };
                    (Family::Parts([f0, f1]), t0 + t1, t0)
                }
            };
            if total > u64::MAX as u128 {
                break;
            }
            let Some(cum) = prev.cum.checked_add(total) else { break };
            let cum_part = [prev.cum_part[0] + (total - block0), prev.cum_part[1] + block0];
            self.info.push(StageInfo { cum, cum_part, total, block0, family: Some(family) });
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn plan(&self) -> &StagePlan {
        &self.plan
    }

    pub fn seed(&self) -> &Arc<dyn AcOracle> {
        &self.seed
    }

    /// Seed vertices forming stage 0, sorted.
    pub fn seed_prefix(&self) -> &[VertexName] {
        &self.prefix
    }

    /// The seed prefix as a finite structure.
    pub fn seed_structure(&self) -> Result<Structure> {
        induced_from(self.seed.as_ref(), self.kind, &self.prefix)
    }

    /// Number of stages whose names can be resolved (at most the planned count).
    pub fn covered(&self) -> u32 {
        self.info.len() as u32 - 1
    }

    fn check_stage(&self, n: u32) -> Result<()> {
        if n > self.covered() {
            return Err(ForgeError::CoverageExceeded { stage: n, planned: self.covered() });
        }
        Ok(())
    }

    /// `|V_n|`.
    pub fn stage_size(&self, n: u32) -> Result<u128> {
        self.check_stage(n)?;
        Ok(self.info[n as usize].cum)
    }

    /// Number of witnesses added at stage `n` (0 for stage 0).
    pub fn witness_count(&self, n: u32) -> Result<u128> {
        self.check_stage(n)?;
        Ok(self.info[n as usize].total)
    }

    fn is_witness_of_limit(&self, n: u32, i: u64) -> bool {
        n >= 1 && n <= self.covered() && (i as u128) < self.info[n as usize].total
    }

    /// Part of witness `(n, i)`.
    fn witness_part(&self, n: u32, i: u64) -> Part {
        if (i as u128) < self.info[n as usize].block0 {
            1
        } else {
            0
        }
    }

    /// Rank of `v` among the vertices of `V_level` (within its part for bipartite kinds).
    fn rank_in(&self, v: &VertexName, level: u32) -> Option<usize> {
        match v.as_witness() {
            None => {
                if self.kind == Kind::Bipartite {
                    self.prefix_part_rank.get(v).copied()
                } else {
                    self.prefix_rank.get(v).copied()
                }
            }
            Some((k, i)) => {
                if k > level || !self.is_witness_of_limit(k, i) {
                    return None;
                }
                let before = &self.info[k as usize - 1];
                let r = if self.kind == Kind::Bipartite {
                    let p = self.witness_part(k, i);
                    let local = if p == 1 { i as u128 } else { i as u128 - self.info[k as usize].block0 };
                    before.cum_part[p as usize] + local
                } else {
                    before.cum + i as u128
                };
                Some(r as usize)
            }
        }
    }

    /// Inverse of [`rank_in`](Self::rank_in) for `level >= 0`.
    fn vertex_at(&self, level: u32, part: Option<Part>, rank: usize) -> VertexName {
        let r = rank as u128;
        let cum = |k: usize| match part {
            Some(p) => self.info[k].cum_part[p as usize],
            None => self.info[k].cum,
        };
        if r < cum(0) {
            return match part {
                Some(p) => self.prefix_part[p as usize][rank].clone(),
                None => self.prefix[rank].clone(),
            };
        }
        let k = (1..=level as usize).find(|&k| r < cum(k)).expect("rank within level");
        let local = r - cum(k - 1);
        let i = match part {
            Some(1) | None => local,
            Some(_) => local + self.info[k].block0,
        };
        VertexName::witness(k as u32, i as u64)
    }

    fn compute_item(&self, n: u32, i: u64) -> Result<Item> {
        let info = &self.info[n as usize];
        match info.family.as_ref().expect("stage >= 1") {
            Family::Subsets(f) => Ok(Item::Subset(f.unrank(i as u128)?)),
            Family::Triples(f) => f.unrank(i as u128),
            Family::Parts(fs) => {
                if (i as u128) < info.block0 {
                    Ok(Item::PartSubset { part: 0, members: fs[0].unrank(i as u128)? })
                } else {
                    Ok(Item::PartSubset { part: 1, members: fs[1].unrank(i as u128 - info.block0)? })
                }
            }
        }
    }

    /// The scheduled item of witness `(n, i)`, as ranks into stage `n-1`.
    pub fn item(&self, n: u32, i: u64) -> Result<Arc<Item>> {
        self.check_stage(n)?;
        if !self.is_witness_of_limit(n, i) {
            return Err(ForgeError::UnknownVertex(VertexName::witness(n, i)));
        }
        if let Some(it) = self.items.read().unwrap().get(&(n, i)) {
            return Ok(it.clone());
        }
        let it = Arc::new(self.compute_item(n, i)?);
        let mut cache = self.items.write().unwrap();
        if cache.len() >= ITEM_CACHE_LIMIT {
            cache.clear();
        }
        Ok(cache.entry((n, i)).or_insert(it).clone())
    }

    fn names_of(&self, level: u32, part: Option<Part>, ranks: &[usize]) -> BTreeSet<VertexName> {
        ranks.iter().map(|&r| self.vertex_at(level, part, r)).collect()
    }

    /// The item of witness `(n, i)` with ranks resolved to names.
    pub fn item_names(&self, n: u32, i: u64) -> Result<ResolvedItem> {
        let it = self.item(n, i)?;
        let lvl = n - 1;
        Ok(match &*it {
            Item::Subset(s) => ResolvedItem::Subset(self.names_of(lvl, None, s)),
            Item::Triple { a, b, c } => ResolvedItem::Triple {
                a: self.names_of(lvl, None, a),
                b: self.names_of(lvl, None, b),
                c: self.names_of(lvl, None, c),
            },
            Item::PartSubset { part, members } => ResolvedItem::PartSubset {
                part: *part,
                members: self.names_of(lvl, Some(*part), members),
            },
        })
    }

    /// Index of the witness scheduled for `item` at stage `n`, if any.
    pub fn index_of(&self, n: u32, item: &ResolvedItem) -> Result<Option<u64>> {
        self.check_stage(n)?;
        if n == 0 {
            return Ok(None);
        }
        let lvl = n - 1;
        let ranks = |s: &BTreeSet<VertexName>| -> Option<Vec<usize>> {
            let mut v: Vec<usize> = s.iter().map(|x| self.rank_in(x, lvl)).collect::<Option<_>>()?;
            v.sort_unstable();
            Some(v)
        };
        let info = &self.info[n as usize];
        let idx = match (info.family.as_ref().unwrap(), item) {
            (Family::Subsets(f), ResolvedItem::Subset(s)) => match ranks(s) {
                Some(r) => f.rank(&r)?,
                None => None,
            },
            (Family::Triples(f), ResolvedItem::Triple { a, b, c }) => match (ranks(a), ranks(b), ranks(c)) {
                (Some(a), Some(b), Some(c)) => f.rank(&a, &b, &c)?,
                _ => None,
            },
            (Family::Parts(fs), ResolvedItem::PartSubset { part, members }) => {
                if members.iter().any(|v| self.part(v) != Some(*part)) {
                    return Ok(None);
                }
                match ranks(members) {
                    Some(r) => fs[*part as usize]
                        .rank(&r)?
                        .map(|x| if *part == 0 { x } else { x + info.block0 }),
                    None => None,
                }
            }
            _ => return Err(ForgeError::Invalid("item kind does not match the limit".into())),
        };
        Ok(idx.map(|x| x as u64))
    }

    /// All vertices of `V_n` in name order.
    pub fn vertices_up_to(&self, n: u32) -> Result<Arc<Vec<VertexName>>> {
        self.check_stage(n)?;
        let size = self.info[n as usize].cum;
        if size > MATERIALIZE_LIMIT {
            return Err(ForgeError::CapExceeded { what: format!("stage {n} vertex list"), size, cap: MATERIALIZE_LIMIT });
        }
        if let Some(v) = self.layouts.lock().unwrap().get(&n) {
            return Ok(v.clone());
        }
        let mut out = self.prefix.clone();
        for k in 1..=n {
            for i in 0..self.info[k as usize].total as u64 {
                out.push(VertexName::witness(k, i));
            }
        }
        let out = Arc::new(out);
        Ok(self.layouts.lock().unwrap().entry(n).or_insert(out).clone())
    }

    /// The finite substructure on `V_n`, built from the schedule.
    pub fn finite_stage(&self, n: u32) -> Result<Structure> {
        let vs = self.vertices_up_to(n)?;
        let mut edges = Vec::new();
        for (i, u) in self.prefix.iter().enumerate() {
            let rest = if self.kind == Kind::Digraph { &self.prefix[..] } else { &self.prefix[i + 1..] };
            for v in rest {
                if u != v && self.seed.adjacent(u, v) {
                    edges.push((u.clone(), v.clone()));
                }
            }
        }
        let mut parts = BTreeMap::new();
        for v in &self.prefix {
            if let Some(p) = self.seed.part(v) {
                parts.insert(v.clone(), p);
            }
        }
        for k in 1..=n {
            for i in 0..self.info[k as usize].total as u64 {
                let w = VertexName::witness(k, i);
                match self.item_names(k, i)? {
                    ResolvedItem::Subset(s) => edges.extend(s.into_iter().map(|x| (w.clone(), x))),
                    ResolvedItem::Triple { a, b, c } => {
                        edges.extend(a.into_iter().map(|x| (w.clone(), x)));
                        edges.extend(b.into_iter().map(|x| (x, w.clone())));
                        for x in c {
                            edges.push((w.clone(), x.clone()));
                            edges.push((x, w.clone()));
                        }
                    }
                    ResolvedItem::PartSubset { part, members } => {
                        parts.insert(w.clone(), 1 - part);
                        edges.extend(members.into_iter().map(|x| (w.clone(), x)));
                    }
                }
            }
        }
        Structure::build(self.kind, vs.iter().cloned().collect(), edges, parts)
    }

    fn stage_of(&self, v: &VertexName) -> u32 {
        v.as_witness().map_or(0, |(n, _)| n)
    }

    /// Does the later witness `w = (n, i)` have an arc to (`outward`) or from `x`?
    fn witness_decides(&self, n: u32, i: u64, x: &VertexName, outward: bool) -> bool {
        let Some(r) = self.rank_in(x, n - 1) else { return false };
        let Ok(it) = self.item(n, i) else { return false };
        match &*it {
            Item::Subset(s) => s.binary_search(&r).is_ok(),
            Item::Triple { a, b, c } => {
                let side = if outward { a } else { b };
                side.binary_search(&r).is_ok() || c.binary_search(&r).is_ok()
            }
            Item::PartSubset { part, members } => self.part(x) == Some(*part) && members.binary_search(&r).is_ok(),
        }
    }

    /// Scan for the `j`-th vertex (from 0) in name order within `V_horizon` satisfying `req`.
    pub fn nth_satisfying(&self, req: &Requirement, j: usize, horizon: u32) -> Result<Option<VertexName>> {
        self.check_stage(horizon)?;
        let mut seen = 0usize;
        for v in &self.prefix {
            if req.holds(self, v) {
                if seen == j {
                    return Ok(Some(v.clone()));
                }
                seen += 1;
            }
        }
        let mut budget = SEARCH_BUDGET;
        for s in 1..=horizon {
            let mut check = |idx: u64| -> Result<Option<VertexName>> {
                if budget == 0 {
                    return Err(ForgeError::BudgetExhausted(format!("searching stage {s} for {req}")));
                }
                budget -= 1;
                let w = VertexName::witness(s, idx);
                if req.holds(self, &w) {
                    if seen == j {
                        return Ok(Some(w));
                    }
                    seen += 1;
                }
                Ok(None)
            };
            match self.candidates(s, req)? {
                Candidates::List(list) => {
                    for idx in list {
                        if let Some(w) = check(idx)? {
                            return Ok(Some(w));
                        }
                    }
                }
                Candidates::Ranges(ranges) => {
                    for (lo, hi) in ranges {
                        for idx in lo..hi {
                            if let Some(w) = check(idx as u64)? {
                                return Ok(Some(w));
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    fn candidates(&self, s: u32, req: &Requirement) -> Result<Candidates> {
        let pos = req.positives();
        if pos.iter().any(|p| self.stage_of(p) == s && p.as_witness().is_some()) {
            return Ok(Candidates::List(Vec::new()));
        }
        let later: Vec<&VertexName> = pos.iter().filter(|p| self.stage_of(p) > s).collect();
        if !later.is_empty() {
            let mut acc: Option<BTreeSet<u64>> = None;
            for p in later {
                let Some((n, i)) = p.as_witness() else { continue };
                if !self.is_witness_of_limit(n, i) {
                    return Ok(Candidates::List(Vec::new()));
                }
                let here: BTreeSet<u64> = self
                    .item_names(n, i)?
                    .all()
                    .into_iter()
                    .filter_map(|x| x.as_witness().filter(|(k, _)| *k == s).map(|(_, idx)| idx))
                    .collect();
                acc = Some(match acc {
                    None => here,
                    Some(a) => a.intersection(&here).copied().collect(),
                });
            }
            return Ok(Candidates::List(acc.unwrap_or_default().into_iter().collect()));
        }
        if pos.iter().any(|p| self.rank_in(p, s - 1).is_none()) {
            return Ok(Candidates::List(Vec::new()));
        }
        let info = &self.info[s as usize];
        let need = pos.len();
        Ok(Candidates::Ranges(match info.family.as_ref().unwrap() {
            Family::Subsets(f) => vec![(f.size_offset(need).unwrap_or(info.total), info.total)],
            Family::Triples(f) => vec![(f.size_offset(need).unwrap_or(info.total), info.total)],
            Family::Parts(fs) => {
                let pos_parts: BTreeSet<Option<Part>> = pos.iter().map(|p| self.part(p)).collect();
                let mut blocks: Vec<Part> = vec![0, 1];
                if let Some(wp) = req.part {
                    blocks.retain(|b| *b == 1 - wp);
                }
                if pos_parts.len() > 1 {
                    blocks.clear();
                } else if let Some(Some(q)) = pos_parts.iter().next() {
                    blocks.retain(|b| b == q);
                }
                blocks
                    .into_iter()
                    .map(|b| {
                        let (base, end) = if b == 0 { (0, info.block0) } else { (info.block0, info.total) };
                        let off = fs[b as usize].size_offset(need).unwrap_or(end - base);
                        (base + off, end)
                    })
                    .collect()
            }
        }))
    }

    /// The earliest vertex outside `U ∪ V` joined to all of `U` and to none of `V`.
    pub fn find_ec_witness(&self, u: &BTreeSet<VertexName>, v: &BTreeSet<VertexName>) -> Result<VertexName> {
        self.find_ec_witness_in_part(u, v, None)
    }

    /// Bipartite variant; `part` fixes the witness's part when `U` is empty.
    pub fn find_ec_witness_in_part(
        &self,
        u: &BTreeSet<VertexName>,
        v: &BTreeSet<VertexName>,
        part: Option<Part>,
    ) -> Result<VertexName> {
        if let Some(x) = u.intersection(v).next() {
            return Err(ForgeError::Invalid(format!("{x} lies in both U and V")));
        }
        let mut req = Requirement::extension(self.kind, u, v);
        req.part = part;
        self.find_requirement(&req)
    }

    /// Digraph variant: arcs `w -> a`, `b -> w`, both ways with `c`, none with `none`.
    pub fn find_ec_witness_digraph(
        &self,
        a: &BTreeSet<VertexName>,
        b: &BTreeSet<VertexName>,
        c: &BTreeSet<VertexName>,
        none: &BTreeSet<VertexName>,
    ) -> Result<VertexName> {
        let all: Vec<&VertexName> = a.iter().chain(b).chain(c).chain(none).collect();
        let distinct: BTreeSet<&VertexName> = all.iter().copied().collect();
        if distinct.len() != all.len() {
            return Err(ForgeError::Invalid("pattern sets must be pairwise disjoint".into()));
        }
        self.find_requirement(&Requirement::digraph_pattern(a, b, c, none))
    }

    fn find_requirement(&self, req: &Requirement) -> Result<VertexName> {
        if let Some(x) = req.mentioned().find(|x| !Presentation::contains(self, x)) {
            return Err(ForgeError::UnknownVertex(x.clone()));
        }
        self.nth_satisfying(req, 0, self.covered())?
            .ok_or_else(|| ForgeError::BeyondHorizon(format!("{req} within {} stages", self.covered())))
    }
}

enum Candidates {
    List(Vec<u64>),
    Ranges(Vec<(u128, u128)>),
}

/// A scheduled item with names in place of ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResolvedItem {
    Subset(BTreeSet<VertexName>),
    Triple { a: BTreeSet<VertexName>, b: BTreeSet<VertexName>, c: BTreeSet<VertexName> },
    PartSubset { part: Part, members: BTreeSet<VertexName> },
}

impl ResolvedItem {
    pub fn all(&self) -> BTreeSet<VertexName> {
        match self {
            ResolvedItem::Subset(s) | ResolvedItem::PartSubset { members: s, .. } => s.clone(),
            ResolvedItem::Triple { a, b, c } => a.iter().chain(b).chain(c).cloned().collect(),
        }
    }

    /// Applies `f` to every member.
    pub fn map(&self, mut f: impl FnMut(&VertexName) -> Result<VertexName>) -> Result<ResolvedItem> {
        let mut m = |s: &BTreeSet<VertexName>| s.iter().map(&mut f).collect::<Result<BTreeSet<_>>>();
        Ok(match self {
            ResolvedItem::Subset(s) => ResolvedItem::Subset(m(s)?),
            ResolvedItem::Triple { a, b, c } => ResolvedItem::Triple { a: m(a)?, b: m(b)?, c: m(c)? },
            ResolvedItem::PartSubset { part, members } => ResolvedItem::PartSubset { part: *part, members: m(members)? },
        })
    }
}

impl Presentation for LazyLimit {
    fn kind(&self) -> Kind {
        self.kind
    }

    fn contains(&self, v: &VertexName) -> bool {
        match v.as_witness() {
            Some((n, i)) => self.is_witness_of_limit(n, i),
            None => self.seed.contains(v),
        }
    }

    fn adjacent(&self, u: &VertexName, v: &VertexName) -> bool {
        if u == v {
            return false;
        }
        let (su, sv) = (self.stage_of(u), self.stage_of(v));
        match (u.as_witness(), v.as_witness()) {
            (None, None) => self.seed.contains(u) && self.seed.contains(v) && self.seed.adjacent(u, v),
            (Some((n, i)), _) if su > sv => self.is_witness_of_limit(n, i) && self.witness_decides(n, i, v, true),
            (_, Some((n, i))) if sv > su => self.is_witness_of_limit(n, i) && self.witness_decides(n, i, u, false),
            _ => false,
        }
    }

    fn part(&self, v: &VertexName) -> Option<Part> {
        if self.kind != Kind::Bipartite {
            return None;
        }
        match v.as_witness() {
            Some((n, i)) if self.is_witness_of_limit(n, i) => Some(self.witness_part(n, i)),
            Some(_) => None,
            None => self.seed.part(v),
        }
    }
}

impl AcOracle for LazyLimit {
    fn enumerate(&self, limit: usize) -> Vec<VertexName> {
        let mut out = Vec::new();
        for n in 0..=self.covered() {
            if out.len() >= limit {
                break;
            }
            if n == 0 {
                out.extend(self.prefix.iter().take(limit).cloned());
            } else {
                let room = (limit - out.len()) as u128;
                for i in 0..self.info[n as usize].total.min(room) as u64 {
                    out.push(VertexName::witness(n, i));
                }
            }
        }
        out
    }

    fn size(&self) -> Option<usize> {
        let c = self.info.last().unwrap().cum;
        (self.seed.size() == Some(self.prefix.len())).then_some(c as usize)
    }

    fn witness(&self, req: &Requirement, j: usize) -> Option<VertexName> {
        self.nth_satisfying(req, j, self.covered()).ok().flatten()
    }

    fn multiplicity(&self, _req: &Requirement) -> Option<usize> {
        None
    }
}

/// Substructure of a presentation on an explicit vertex list.
pub(crate) fn induced_from(p: &dyn AcOracle, kind: Kind, vs: &[VertexName]) -> Result<Structure> {
    let mut edges = Vec::new();
    for (i, u) in vs.iter().enumerate() {
        let rest = if kind == Kind::Digraph { vs } else { &vs[i + 1..] };
        for v in rest {
            if u != v && p.adjacent(u, v) {
                edges.push((u.clone(), v.clone()));
            }
        }
    }
    let parts = vs.iter().filter_map(|v| p.part(v).map(|q| (v.clone(), q))).collect();
    Structure::build(kind, vs.iter().cloned().collect(), edges, parts)
}
