//! Endomorphisms of a lazy limit, defined stage by stage from a map on the seed.
//!
//! Every witness `(n, i)` is sent to a vertex chosen by a rule from the images
//! of its scheduled item. Values are memoised; evaluation is deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::constructions::SchutzPair;
use crate::error::{ForgeError, Result};
use crate::finite_graph::{
    check_embedding, check_homomorphism, homomorphism_defect, Kind, Part, Presentation, Structure, VertexMap, VertexName,
};
use crate::universal::{AcOracle, LazyLimit, Requirement, ResolvedItem};

/// Skip counts: which qualifying vertex (from 0) a witness is sent to.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum ChoiceSequence {
    #[default]
    Zero,
    Constant(usize),
    /// Indexed by schedule index modulo the length.
    Periodic(Vec<usize>),
    /// Explicit values at `(stage, index)`, 0 elsewhere.
    Explicit(BTreeMap<(u32, u64), usize>),
}

impl ChoiceSequence {
    pub fn at(&self, stage: u32, index: u64) -> usize {
        match self {
            ChoiceSequence::Zero => 0,
            ChoiceSequence::Constant(j) => *j,
            ChoiceSequence::Periodic(v) if v.is_empty() => 0,
            ChoiceSequence::Periodic(v) => v[(index % v.len() as u64) as usize],
            ChoiceSequence::Explicit(m) => m.get(&(stage, index)).copied().unwrap_or(0),
        }
    }
}

/// `"3"` is constant, `"0,1,0"` periodic, `"1.2=1,2.0=3"` explicit.
impl FromStr for ChoiceSequence {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || ForgeError::Invalid(format!("cannot parse choice sequence {s:?}"));
        if s.is_empty() {
            return Ok(ChoiceSequence::Zero);
        }
        if s.contains('=') {
            let mut m = BTreeMap::new();
            for part in s.split(',') {
                let (key, val) = part.split_once('=').ok_or_else(bad)?;
                let (n, i) = key.trim().split_once('.').ok_or_else(bad)?;
                m.insert(
                    (n.parse().map_err(|_| bad())?, i.parse().map_err(|_| bad())?),
                    val.trim().parse().map_err(|_| bad())?,
                );
            }
            return Ok(ChoiceSequence::Explicit(m));
        }
        let vals: Vec<usize> = s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
        Ok(if vals.len() == 1 { ChoiceSequence::Constant(vals[0]) } else { ChoiceSequence::Periodic(vals) })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedMap {
    /// Fixes every seed vertex, including oracle vertices beyond the prefix.
    Identity,
    Table(VertexMap),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Generic,
    ImagePreserving,
    AutomorphismLift,
    Idempotent,
    Composite,
}

#[derive(Clone)]
enum Rule {
    Extend { strict: bool },
    Image(Arc<dyn AcOracle>),
    Automorphism { sigma: [Part; 2] },
    Compose(Arc<LimitEndomorphism>, Arc<LimitEndomorphism>),
}

pub struct LimitEndomorphism {
    base: Arc<LazyLimit>,
    seed_map: SeedMap,
    mode: Mode,
    rule: Rule,
    choices: ChoiceSequence,
    /// Target part for each source part (bipartite only).
    target_part: [Part; 2],
    memo: Mutex<HashMap<VertexName, VertexName>>,
    /// Strict mode: images of each stage's witnesses, in schedule order.
    stage_images: Mutex<HashMap<u32, Vec<VertexName>>>,
}

impl fmt::Debug for LimitEndomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LimitEndomorphism")
            .field("mode", &self.mode)
            .field("choices", &self.choices)
            .field("memoised", &self.memo.lock().unwrap().len())
            .finish()
    }
}

/// A map on `V_stage` into the limit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialHom {
    pub stage: u32,
    pub map: VertexMap,
}

fn part_map(base: &LazyLimit, f: &SeedMap) -> [Part; 2] {
    let mut q: [Option<Part>; 2] = [None, None];
    if base.kind() == Kind::Bipartite {
        for v in base.seed_prefix() {
            let Some(p) = base.part(v) else { continue };
            if q[p as usize].is_some() {
                continue;
            }
            let image = match f {
                SeedMap::Identity => Some(v.clone()),
                SeedMap::Table(m) => m.get(v).cloned(),
            };
            q[p as usize] = image.and_then(|w| base.part(&w));
        }
    }
    match q {
        [Some(a), Some(b)] => [a, b],
        [Some(a), None] => [a, 1 - a],
        [None, Some(b)] => [1 - b, b],
        [None, None] => [0, 1],
    }
}

fn check_seed_table(base: &LazyLimit, m: &VertexMap) -> Result<Structure> {
    let seed = base.seed_structure()?;
    for v in seed.vertices() {
        if m.get(v).is_none() {
            return Err(ForgeError::PartialMap(v.clone()));
        }
    }
    if let Some(d) = homomorphism_defect(m, &seed, base) {
        return Err(ForgeError::NotHomomorphism(d));
    }
    Ok(seed)
}

impl LimitEndomorphism {
    fn with_rule(base: Arc<LazyLimit>, seed_map: SeedMap, mode: Mode, rule: Rule, choices: ChoiceSequence) -> Self {
        let target_part = part_map(&base, &seed_map);
        LimitEndomorphism {
            base,
            seed_map,
            mode,
            rule,
            choices,
            target_part,
            memo: Mutex::new(HashMap::new()),
            stage_images: Mutex::new(HashMap::new()),
        }
    }

    /// Extends a seed homomorphism: witness `(n, i)` goes to the `j`-th vertex
    /// in name order joined to the images of its item. `strict` also requires
    /// adjacency to the images of the stage's earlier witnesses.
    pub fn extend_hom(base: Arc<LazyLimit>, f0: SeedMap, choices: ChoiceSequence, strict: bool) -> Result<Self> {
        if let SeedMap::Table(m) = &f0 {
            check_seed_table(&base, m)?;
        }
        Ok(Self::with_rule(base, f0, Mode::Generic, Rule::Extend { strict }, choices))
    }

    /// Like [`extend_hom`](Self::extend_hom), with witnesses drawn from `image`
    /// through its witness function.
    pub fn extend_hom_image_preserving(
        base: Arc<LazyLimit>,
        f0: SeedMap,
        image: Arc<dyn AcOracle>,
        choices: ChoiceSequence,
    ) -> Result<Self> {
        if image.kind() != base.kind() {
            return Err(ForgeError::KindMismatch { expected: base.kind(), found: image.kind() });
        }
        match &f0 {
            SeedMap::Table(m) => {
                check_seed_table(&base, m)?;
                if let Some((_, w)) = m.iter().find(|(_, w)| !image.contains(w)) {
                    return Err(ForgeError::Invalid(format!("seed image {w} lies outside the image oracle")));
                }
            }
            SeedMap::Identity => {
                if let Some(v) = base.seed_prefix().iter().find(|v| !image.contains(v)) {
                    return Err(ForgeError::Invalid(format!("seed vertex {v} lies outside the image oracle")));
                }
            }
        }
        Ok(Self::with_rule(base, f0, Mode::ImagePreserving, Rule::Image(image), choices))
    }

    /// The identity on the seed, extended with witnesses taken from the seed
    /// oracle; idempotent with image the seed.
    pub fn idempotent_onto(base: Arc<LazyLimit>, choices: ChoiceSequence) -> Result<Self> {
        let image = base.seed().clone();
        let mut e = Self::extend_hom_image_preserving(base, SeedMap::Identity, image, choices)?;
        e.mode = Mode::Idempotent;
        Ok(e)
    }

    /// Lifts a seed automorphism by permuting scheduled items.
    pub fn extend_automorphism(base: Arc<LazyLimit>, g0: SeedMap) -> Result<Self> {
        let seed = base.seed_structure()?;
        if let SeedMap::Table(m) = &g0 {
            if seed.vertices().iter().any(|v| m.get(v).is_none()) || m.len() != seed.len() {
                return Err(ForgeError::NotAutomorphism("map must be defined exactly on the seed".into()));
            }
            if m.iter().any(|(_, w)| !seed.contains(w)) || !m.is_injective() {
                return Err(ForgeError::NotAutomorphism("map is not a permutation of the seed".into()));
            }
            if !check_embedding(m, &seed, &seed) {
                return Err(ForgeError::NotAutomorphism("map does not preserve and reflect adjacency".into()));
            }
        }
        let sigma = part_map(&base, &g0);
        Ok(Self::with_rule(base, g0, Mode::AutomorphismLift, Rule::Automorphism { sigma }, ChoiceSequence::Zero))
    }

    /// `first` then `second`.
    pub fn compose(first: Arc<LimitEndomorphism>, second: Arc<LimitEndomorphism>) -> Result<Self> {
        if !Arc::ptr_eq(&first.base, &second.base) {
            return Err(ForgeError::Invalid("composed endomorphisms must share a base".into()));
        }
        let base = first.base.clone();
        Ok(Self::with_rule(base, SeedMap::Identity, Mode::Composite, Rule::Compose(first, second), ChoiceSequence::Zero))
    }

    pub fn base(&self) -> &Arc<LazyLimit> {
        &self.base
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn choices(&self) -> &ChoiceSequence {
        &self.choices
    }

    pub fn evaluate(&self, v: &VertexName) -> Result<VertexName> {
        if let Rule::Compose(a, b) = &self.rule {
            return b.evaluate(&a.evaluate(v)?);
        }
        if !self.base.contains(v) {
            return match v.as_witness() {
                Some((n, _)) if n > self.base.covered() => {
                    Err(ForgeError::CoverageExceeded { stage: n, planned: self.base.covered() })
                }
                _ => Err(ForgeError::UnknownVertex(v.clone())),
            };
        }
        let Some((n, i)) = v.as_witness() else {
            return match &self.seed_map {
                SeedMap::Identity => Ok(v.clone()),
                SeedMap::Table(m) => m.get(v).cloned().ok_or_else(|| ForgeError::PartialMap(v.clone())),
            };
        };
        if let Some(w) = self.memo.lock().unwrap().get(v) {
            return Ok(w.clone());
        }
        let w = match &self.rule {
            Rule::Extend { strict: true } => self.strict_value(n, i)?,
            _ => self.compute(n, i, &[])?,
        };
        self.memo.lock().unwrap().insert(v.clone(), w.clone());
        Ok(w)
    }

    fn strict_value(&self, n: u32, i: u64) -> Result<VertexName> {
        loop {
            let done: Vec<VertexName> = self.stage_images.lock().unwrap().get(&n).cloned().unwrap_or_default();
            if (i as usize) < done.len() {
                return Ok(done[i as usize].clone());
            }
            let k = done.len() as u64;
            let earlier: Vec<VertexName> = if self.base.kind() == Kind::Bipartite {
                let p = self.base.part(&VertexName::witness(n, k));
                (0..k)
                    .filter(|&x| self.base.part(&VertexName::witness(n, x)) != p)
                    .map(|x| done[x as usize].clone())
                    .collect()
            } else {
                done
            };
            let w = self.compute(n, k, &earlier)?;
            let mut imgs = self.stage_images.lock().unwrap();
            let entry = imgs.entry(n).or_default();
            if entry.len() == k as usize {
                entry.push(w);
            }
        }
    }

    fn requirement(&self, n: u32, i: u64, extra: &[VertexName]) -> Result<Requirement> {
        let item = self.base.item_names(n, i)?;
        let img = |s: &BTreeSet<VertexName>| s.iter().map(|x| self.evaluate(x)).collect::<Result<BTreeSet<_>>>();
        let kind = self.base.kind();
        let mut req = match &item {
            ResolvedItem::Subset(s) => Requirement::joined_to(kind, img(s)?),
            ResolvedItem::Triple { a, b, c } => {
                let (a, b, c) = (img(a)?, img(b)?, img(c)?);
                Requirement {
                    out: a.union(&c).cloned().collect(),
                    inc: b.union(&c).cloned().collect(),
                    ..Default::default()
                }
            }
            ResolvedItem::PartSubset { part, members } => {
                let mut r = Requirement::joined_to(kind, img(members)?);
                r.part = Some(self.target_part[1 - *part as usize]);
                r
            }
        };
        for x in extra {
            req.out.insert(x.clone());
            if kind == Kind::Digraph {
                req.inc.insert(x.clone());
            }
        }
        Ok(req)
    }

    fn compute(&self, n: u32, i: u64, extra: &[VertexName]) -> Result<VertexName> {
        let j = self.choices.at(n, i);
        match &self.rule {
            Rule::Extend { .. } => {
                let req = self.requirement(n, i, extra)?;
                let horizon = self.base.covered();
                self.base.nth_satisfying(&req, j, horizon)?.ok_or_else(|| {
                    ForgeError::BeyondHorizon(format!("choice {j} for w{n}.{i}: {req} within {horizon} stages"))
                })
            }
            Rule::Image(oracle) => {
                let req = self.requirement(n, i, extra)?;
                match oracle.witness(&req, j) {
                    Some(w) if self.base.contains(&w) => Ok(w),
                    Some(w) => Err(ForgeError::Invalid(format!("image witness {w} is not a vertex of the limit"))),
                    None if j > 0 && oracle.witness(&req, 0).is_some() => Err(ForgeError::ChoiceOutOfRange {
                        choice: j,
                        multiplicity: oracle.multiplicity(&req).unwrap_or(0),
                        requirement: req.to_string(),
                    }),
                    None => Err(ForgeError::NoWitness(format!("image oracle has no vertex with {req}"))),
                }
            }
            Rule::Automorphism { sigma } => {
                let item = self.base.item_names(n, i)?;
                let mapped = match item.map(|x| self.evaluate(x))? {
                    ResolvedItem::PartSubset { part, members } => ResolvedItem::PartSubset { part: sigma[part as usize], members },
                    other => other,
                };
                let j = self.base.index_of(n, &mapped)?.ok_or_else(|| {
                    ForgeError::NotAutomorphism(format!("image of the item of w{n}.{i} is not scheduled at stage {n}"))
                })?;
                Ok(VertexName::witness(n, j))
            }
            Rule::Compose(..) => unreachable!("compositions are evaluated directly"),
        }
    }

    /// The map on `V_n`, checked to be a homomorphism into the limit.
    pub fn restrict(&self, n: u32) -> Result<PartialHom> {
        let vs = self.base.vertices_up_to(n)?;
        let map: VertexMap = vs.iter().map(|v| Ok((v.clone(), self.evaluate(v)?))).collect::<Result<_>>()?;
        let domain = self.base.finite_stage(n)?;
        if let Some(d) = homomorphism_defect(&map, &domain, self.base.as_ref()) {
            return Err(ForgeError::NotHomomorphism(d));
        }
        Ok(PartialHom { stage: n, map })
    }

    /// `None` if `e(e(v)) = e(v)` on `V_n`, otherwise the first counterexample.
    pub fn verify_idempotent(&self, n: u32) -> Result<Option<VertexName>> {
        for v in self.base.vertices_up_to(n)?.iter() {
            let w = self.evaluate(v)?;
            if self.evaluate(&w)? != w {
                return Ok(Some(v.clone()));
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GreedyReport {
    pub map: VertexMap,
    pub injective: bool,
    /// Edges go to `E*` edges and non-edges to `E*` non-edges.
    pub embedding_into_e_star: bool,
    pub homomorphism_into_e_zero: bool,
    /// Image pairs joined in `E₀` whose preimages are not adjacent.
    pub discrepancies: Vec<(VertexName, VertexName)>,
}

impl GreedyReport {
    /// The image with respect to `E₀` is strictly smaller than the induced one.
    pub fn image_differs(&self) -> bool {
        !self.discrepancies.is_empty()
    }
}

/// Maps `source` into `(V*, E*)` one vertex at a time, in name order: each
/// vertex goes to the first unused target vertex whose `E*` adjacency to the
/// images so far matches the source. `forced` pairs are assigned first.
pub fn greedy_injective_hom(
    source: &Structure,
    target: &SchutzPair,
    forced: &[(VertexName, VertexName)],
) -> Result<GreedyReport> {
    if source.kind() != Kind::Graph {
        return Err(ForgeError::KindMismatch { expected: Kind::Graph, found: source.kind() });
    }
    let star = &target.e_star;
    let mut map = VertexMap::default();
    let mut used = BTreeSet::new();
    for (v, w) in forced {
        if !source.contains(v) {
            return Err(ForgeError::UnknownVertex(v.clone()));
        }
        if !star.contains(w) {
            return Err(ForgeError::UnknownVertex(w.clone()));
        }
        map.insert(v.clone(), w.clone());
        used.insert(w.clone());
    }
    for v in source.vertices() {
        if map.get(v).is_some() {
            continue;
        }
        let mut u = BTreeSet::new();
        let mut non = BTreeSet::new();
        for (x, fx) in map.iter() {
            if source.adjacent(v, x) {
                u.insert(fx.clone());
            } else {
                non.insert(fx.clone());
            }
        }
        let w = star
            .vertices()
            .iter()
            .find(|w| !used.contains(*w) && u.iter().all(|x| star.adjacent(w, x)) && !non.iter().any(|x| star.adjacent(w, x)))
            .cloned()
            .ok_or_else(|| {
                ForgeError::BudgetExhausted(format!("no unused target vertex for {v} joined to {} and avoiding {}", u.len(), non.len()))
            })?;
        used.insert(w.clone());
        map.insert(v.clone(), w);
    }
    let injective = map.is_injective();
    let embedding_into_e_star = check_embedding(&map, source, star);
    let homomorphism_into_e_zero = check_homomorphism(&map, source, &target.e_zero);
    let mut discrepancies = Vec::new();
    let vs: Vec<&VertexName> = source.vertices().iter().collect();
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            let (fa, fb) = (map.get(a).unwrap(), map.get(b).unwrap());
            if !source.adjacent(a, b) && target.e_zero.adjacent(fa, fb) {
                discrepancies.push(if fa < fb { (fa.clone(), fb.clone()) } else { (fb.clone(), fa.clone()) });
            }
        }
    }
    discrepancies.sort();
    Ok(GreedyReport { map, injective, embedding_into_e_star, homomorphism_into_e_zero, discrepancies })
}
