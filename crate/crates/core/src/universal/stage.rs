//! Eager construction of a single witness stage over a finite structure.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{ForgeError, Result};
use crate::finite_graph::{Kind, Structure, VertexName};

#[derive(Clone, Debug, Default)]
pub struct Schedule {
    /// Largest subset (union, for digraphs) that receives a witness.
    pub cap: Option<usize>,
    /// If set, only subsets meeting these vertices receive witnesses.
    pub fresh: Option<BTreeSet<VertexName>>,
    /// Refuse to build stages with more new witnesses than this.
    pub max_items: usize,
}

impl Schedule {
    pub fn exact(max_items: usize) -> Self {
        Schedule { cap: None, fresh: None, max_items }
    }
}

#[derive(Clone, Debug)]
pub struct StageOutput {
    pub structure: Structure,
    pub new_vertices: BTreeSet<VertexName>,
}

fn subsets_of(vs: &[VertexName], cap: usize, fresh: Option<&BTreeSet<VertexName>>, max: usize) -> Result<Vec<Vec<VertexName>>> {
    if vs.len() >= 63 {
        return Err(ForgeError::CapExceeded { what: "eager stage base".into(), size: vs.len() as u128, cap: 62 });
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << vs.len()) {
        if mask.count_ones() as usize > cap {
            continue;
        }
        let s: Vec<VertexName> = (0..vs.len()).filter(|i| mask >> i & 1 == 1).map(|i| vs[i].clone()).collect();
        if fresh.is_some_and(|f| !s.iter().any(|x| f.contains(x))) {
            continue;
        }
        out.push(s);
        if out.len() > max {
            return Err(ForgeError::CapExceeded { what: "eager stage items".into(), size: out.len() as u128, cap: max as u128 });
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Adds stage `stage_no` to `current`: one new witness per scheduled item,
/// named `w{stage_no}.i` in schedule order.
pub fn witness_stage(current: &Structure, stage_no: u32, schedule: &Schedule) -> Result<StageOutput> {
    if stage_no == 0 {
        return Err(ForgeError::Invalid("witness stages are numbered from 1".into()));
    }
    let vs: Vec<VertexName> = current.vertices().iter().cloned().collect();
    let cap = schedule.cap.unwrap_or(vs.len());
    let fresh = schedule.fresh.as_ref();
    let mut edges: Vec<(VertexName, VertexName)> = current.arcs().map(|(u, v)| (u.clone(), v.clone())).collect();
    let mut parts: BTreeMap<VertexName, u8> = current.parts().clone();
    let mut new_vertices = BTreeSet::new();
    let mut push = |i: usize| {
        let w = VertexName::witness(stage_no, i as u64);
        new_vertices.insert(w.clone());
        w
    };
    match current.kind() {
        Kind::Graph => {
            for (i, s) in subsets_of(&vs, cap, fresh, schedule.max_items)?.into_iter().enumerate() {
                let w = push(i);
                edges.extend(s.into_iter().map(|x| (w.clone(), x)));
            }
        }
        Kind::Digraph => {
            let mut i = 0;
            for s in subsets_of(&vs, cap, fresh, schedule.max_items)? {
                let labels = 3usize.checked_pow(s.len() as u32).unwrap_or(usize::MAX);
                if i + labels > schedule.max_items {
                    return Err(ForgeError::CapExceeded {
                        what: "eager stage items".into(),
                        size: (i + labels) as u128,
                        cap: schedule.max_items as u128,
                    });
                }
                for label in 0..labels {
                    let w = push(i);
                    i += 1;
                    let mut l = label;
                    for x in s.iter().rev() {
                        match l % 3 {
                            0 => edges.push((w.clone(), x.clone())),
                            1 => edges.push((x.clone(), w.clone())),
                            _ => {
                                edges.push((w.clone(), x.clone()));
                                edges.push((x.clone(), w.clone()));
                            }
                        }
                        l /= 3;
                    }
                }
            }
        }
        Kind::Bipartite => {
            let mut i = 0;
            for p in 0..2u8 {
                let members: Vec<VertexName> = current.part_members(p).into_iter().collect();
                let budget = schedule.max_items.saturating_sub(i);
                for s in subsets_of(&members, cap, fresh, budget)? {
                    let w = push(i);
                    i += 1;
                    parts.insert(w.clone(), 1 - p);
                    edges.extend(s.into_iter().map(|x| (w.clone(), x)));
                }
            }
        }
    }
    let all: BTreeSet<VertexName> = vs.into_iter().chain(new_vertices.iter().cloned()).collect();
    let structure = Structure::build(current.kind(), all, edges, parts)?;
    Ok(StageOutput { structure, new_vertices })
}

/// Stages `1..=stages` built eagerly, returning `V_stages`.
pub fn eager_stages(seed: &Structure, stages: u32, cap: Option<usize>, fresh_mode: bool, max_items: usize) -> Result<Structure> {
    let mut cur = seed.clone();
    let mut last_new: Option<BTreeSet<VertexName>> = None;
    for n in 1..=stages {
        let sched = Schedule { cap, fresh: if fresh_mode { last_new.clone() } else { None }, max_items };
        let out = witness_stage(&cur, n, &sched)?;
        cur = out.structure;
        last_new = Some(out.new_vertices);
    }
    Ok(cur)
}
