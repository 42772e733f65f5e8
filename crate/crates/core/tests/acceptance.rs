//! Acceptance suite: one line per criterion.
//!
//! Criteria that cannot hold as worded are listed in `KNOWN_FAILURES`; they are
//! still evaluated in full and reported as FAIL. The run fails if any other
//! criterion fails, or if a known failure unexpectedly passes.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use fraisse_core::constructions::{
    blowup, blown, build_m, dashv, delta_construction, phi_b, prime, psi_b, schutz_pair, IndexSet, SchutzCaps,
};
use fraisse_core::endomorphism::{greedy_injective_hom, ChoiceSequence, LimitEndomorphism, SeedMap};
use fraisse_core::green::{enumerate_endos, green_relations, maximal_subgroup, verify_green_structure};
use fraisse_core::universal::{eager_stages, lazy_delta, limit, witness_stage, AcOracle, IndexRule, LazyLimit, Schedule, StagePlan};
use fraisse_core::{
    automorphisms_with_cap, check_embedding, check_homomorphism, complement, complete_bipartite, complete_digraph,
    complete_graph, count_automorphisms_with_cap, induced, isomorphic_with_cap, kernel, path_graph, Presentation,
    Structure, VertexMap, VertexName,
};

type Outcome = Result<String, String>;

const KNOWN_FAILURES: &[u32] = &[5, 8];

fn s(i: u32) -> VertexName {
    VertexName::seed(i)
}

fn w(n: u32, i: u64) -> VertexName {
    VertexName::witness(n, i)
}

fn set(items: &[u64]) -> IndexSet {
    IndexSet::new(items.iter().copied()).unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn all_graphs(n: u32) -> Vec<Structure> {
    let vs: Vec<VertexName> = (0..n).map(s).collect();
    let pairs: Vec<(VertexName, VertexName)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (s(i), s(j)))).collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let es = pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, e)| e.clone());
            Structure::graph(vs.clone(), es.collect::<Vec<_>>()).unwrap()
        })
        .collect()
}

fn all_digraphs(n: u32) -> Vec<Structure> {
    let vs: Vec<VertexName> = (0..n).map(s).collect();
    let arcs: Vec<(VertexName, VertexName)> =
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (s(i), s(j)))).collect();
    (0u32..1 << arcs.len())
        .map(|mask| {
            let es = arcs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, e)| e.clone());
            Structure::digraph(vs.clone(), es.collect::<Vec<_>>()).unwrap()
        })
        .collect()
}

/// Every bipartite graph with the given part sizes (part 0 is `s0..`).
fn all_bipartite(a: u32, b: u32) -> Vec<Structure> {
    let parts: Vec<(VertexName, u8)> = (0..a).map(|i| (s(i), 0)).chain((a..a + b).map(|i| (s(i), 1))).collect();
    let pairs: Vec<(VertexName, VertexName)> = (0..a).flat_map(|i| (a..a + b).map(move |j| (s(i), s(j)))).collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let es = pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, e)| e.clone());
            Structure::bipartite(parts.clone(), es.collect::<Vec<_>>()).unwrap()
        })
        .collect()
}

fn connected(g: &Structure) -> bool {
    let Some(start) = g.vertices().iter().next() else { return false };
    let mut seen = BTreeSet::from([start.clone()]);
    let mut stack = vec![start.clone()];
    while let Some(v) = stack.pop() {
        for u in g.vertices() {
            if (g.adjacent(&v, u) || g.adjacent(u, &v)) && seen.insert(u.clone()) {
                stack.push(u.clone());
            }
        }
    }
    seen.len() == g.len()
}

fn edgeless(n: u32) -> Structure {
    Structure::graph((0..n).map(s), Vec::new()).unwrap()
}

fn criterion_1() -> Outcome {
    let mut structures = Vec::new();
    for n in 1..=4 {
        structures.extend(all_graphs(n));
    }
    for n in 1..=3 {
        structures.extend(all_digraphs(n));
    }
    for a in 0..=2 {
        for b in 0..=2 {
            if a + b > 0 {
                structures.extend(all_bipartite(a, b));
            }
        }
    }
    let mut claims = 0;
    for g in &structures {
        let report = verify_green_structure(g).map_err(e2s)?;
        if let Some(c) = report.claims.iter().find(|c| !c.passed()) {
            return Err(format!("{} fails on {:?}: {:?}", c.name, g, c.counterexamples));
        }
        claims += report.claims.iter().map(|c| c.checked).sum::<usize>();
    }
    Ok(format!("{} structures, {claims} instances, no counterexamples", structures.len()))
}

fn criterion_2() -> Outcome {
    let p = path_graph(3);
    let m = enumerate_endos(&p).map_err(e2s)?;
    let g = green_relations(&m);
    let fold: VertexMap = [(s(0), s(0)), (s(1), s(1)), (s(2), s(0))].into_iter().collect();
    let e = m.index_of(&fold).ok_or("fold is not an endomorphism")?;
    ensure(m.is_idempotent(e), "fold is not idempotent")?;
    let h = maximal_subgroup(&m, &g, e).map_err(e2s)?;
    ensure(h.order() == 2, format!("|H_e| = {}", h.order()))?;
    let img = m.induced_image(e).map_err(e2s)?;
    ensure(isomorphic_with_cap(&img, &complete_graph(2), 4).map_err(e2s)?, "image is not an edge")?;
    let auts: BTreeSet<VertexMap> = automorphisms_with_cap(&img, 4).map_err(e2s)?.into_iter().collect();
    let restricted: BTreeSet<VertexMap> = h
        .elements
        .iter()
        .map(|&x| {
            let f = m.to_map(x);
            img.vertices().iter().map(|v| (v.clone(), f.get(v).unwrap().clone())).collect()
        })
        .collect();
    ensure(restricted == auts, "restriction to the image is not Aut(K2)")?;

    let t3 = enumerate_endos(&edgeless(3)).map_err(e2s)?;
    let gt = green_relations(&t3);
    let mut rank2 = 0;
    for e in t3.idempotents().into_iter().filter(|&e| t3.rank(e) == 2) {
        let order = maximal_subgroup(&t3, &gt, e).map_err(e2s)?.order();
        ensure(order == 2, format!("rank-2 idempotent with |H_e| = {order}"))?;
        rank2 += 1;
    }
    Ok(format!("path: |H_e| = 2 = |Aut(K2)|; T3: {rank2} rank-2 idempotents, each |H_e| = 2"))
}

fn criterion_3() -> Outcome {
    let k2 = complete_graph(2);
    let one = witness_stage(&k2, 1, &Schedule::exact(1 << 10)).map_err(e2s)?.structure;
    ensure(one.len() == 6 && one.edge_count() == 5, format!("stage 1: {} vertices, {} edges", one.len(), one.edge_count()))?;
    let two = eager_stages(&k2, 2, None, false, 1 << 10).map_err(e2s)?;
    ensure(two.len() == 70, format!("stage 2: {} vertices", two.len()))?;
    let lim = limit(&k2, StagePlan::exact(2)).map_err(e2s)?;
    let mut pairs = 0;
    for u in two.vertices() {
        for v in two.vertices() {
            ensure(lim.adjacent(u, v) == two.adjacent(u, v), format!("adjacency of {u}, {v} disagrees"))?;
            pairs += 1;
        }
    }
    Ok(format!("6 vertices / 5 edges, then 70 vertices; {pairs} pairs agree"))
}

fn criterion_4() -> Outcome {
    let k2 = complete_graph(2);
    let lim = limit(&k2, StagePlan::exact(2)).map_err(e2s)?;
    let eager = eager_stages(&k2, 2, None, false, 1 << 10).map_err(e2s)?;
    let mut seen = Vec::new();
    for code in 0..9u32 {
        let mut u = BTreeSet::new();
        let mut v = BTreeSet::new();
        for (k, x) in [s(0), s(1)].into_iter().enumerate() {
            match code / 3u32.pow(k as u32) % 3 {
                1 => {
                    u.insert(x);
                }
                2 => {
                    v.insert(x);
                }
                _ => {}
            }
        }
        let found = lim.find_ec_witness(&u, &v).map_err(e2s)?;
        ensure(eager.contains(&found), format!("{found} outside the eager stage"))?;
        ensure(!u.contains(&found) && !v.contains(&found), format!("{found} lies in U or V"))?;
        ensure(u.iter().all(|x| eager.adjacent(&found, x)), format!("{found} misses U = {u:?}"))?;
        ensure(!v.iter().any(|x| eager.adjacent(&found, x)), format!("{found} meets V = {v:?}"))?;
        seen.push(found);
    }
    let a_not_b = lim.find_ec_witness(&[s(0)].into(), &[s(1)].into()).map_err(e2s)?;
    ensure(a_not_b == w(1, 1), format!("U={{a}}, V={{b}} gave {a_not_b}"))?;
    Ok(format!("9 pairs verified; U={{a}}, V={{b}} -> {a_not_b}"))
}

fn stage_one(e: &LimitEndomorphism) -> Result<Vec<VertexName>, String> {
    (0..4).map(|i| e.evaluate(&w(1, i)).map_err(e2s)).collect()
}

fn criterion_5() -> Outcome {
    let base = Arc::new(limit(&complete_graph(2), StagePlan::exact(2)).map_err(e2s)?);
    let documented = vec![s(0), s(1), s(0), w(1, 3)];
    let mut notes = Vec::new();

    // Branching and homomorphy, checked in the mode that admits a stage-2 restriction.
    let loose0 = LimitEndomorphism::extend_hom(base.clone(), SeedMap::Identity, ChoiceSequence::Zero, false).map_err(e2s)?;
    let loose1 =
        LimitEndomorphism::extend_hom(base.clone(), SeedMap::Identity, ChoiceSequence::Constant(1), false).map_err(e2s)?;
    let loose_assignment = stage_one(&loose0)?;
    let r0 = loose0.restrict(2).map_err(e2s)?;
    let r1 = loose1.restrict(1).map_err(e2s)?;
    let differ = r1.map.iter().filter(|(v, x)| r0.map.get(v) != Some(*x)).count();
    notes.push(format!(
        "non-strict: stage 1 {} documented, restrict(2) homomorphic, choices 0/1 differ at {differ} stage-1 vertices",
        if loose_assignment == documented { "matches" } else { "differs from" }
    ));
    ensure(loose_assignment == documented && differ > 0, notes.join("; "))?;

    let strict = LimitEndomorphism::extend_hom(base.clone(), SeedMap::Identity, ChoiceSequence::Zero, true).map_err(e2s)?;
    let strict_assignment = stage_one(&strict)?;
    let shown: Vec<String> = strict_assignment.iter().map(|v| v.to_string()).collect();
    notes.push(format!("strict: stage 1 = [{}]", shown.join(", ")));
    let strict_restrict = strict.restrict(2);
    notes.push(match &strict_restrict {
        Ok(_) => "strict restrict(2) homomorphic".into(),
        Err(e) => format!("strict restrict(2) failed: {e}"),
    });
    ensure(strict_assignment == documented, notes.join("; "))?;
    ensure(strict_restrict.is_ok(), notes.join("; "))?;
    Ok(notes.join("; "))
}

fn criterion_6() -> Outcome {
    let k3 = complete_graph(3);
    let oracle = Arc::new(lazy_delta(&k3, IndexRule::finite(set(&[2]))).map_err(e2s)?);
    let base = Arc::new(LazyLimit::new(oracle.clone(), k3.len(), StagePlan::exact(2)).map_err(e2s)?);
    let a = LimitEndomorphism::idempotent_onto(base.clone(), ChoiceSequence::Zero).map_err(e2s)?;
    let choice_b = ChoiceSequence::Explicit(BTreeMap::from([((1, 1), 1)]));
    let b = LimitEndomorphism::idempotent_onto(base.clone(), choice_b).map_err(e2s)?;
    for e in [&a, &b] {
        if let Some(v) = e.verify_idempotent(2).map_err(e2s)? {
            return Err(format!("not idempotent at {v}"));
        }
    }
    let ra = a.restrict(2).map_err(e2s)?;
    let rb = b.restrict(2).map_err(e2s)?;
    for r in [&ra, &rb] {
        if let Some((v, x)) = r.map.iter().find(|(_, x)| !oracle.contains(x)) {
            return Err(format!("{v} maps to {x}, outside the image"));
        }
    }
    // Both fix a window of the image pointwise, so each image is the whole oracle.
    for v in oracle.enumerate(64) {
        ensure(a.evaluate(&v).map_err(e2s)? == v && b.evaluate(&v).map_err(e2s)? == v, format!("{v} is moved"))?;
    }
    ensure(ra != rb, "the two choice sequences agree on stage 2")?;
    let stage = base.finite_stage(2).map_err(e2s)?;
    let (ka, kb) = (kernel(&ra.map, &stage), kernel(&rb.map, &stage));
    ensure(ka != kb, "kernels coincide on stage 2")?;
    Ok(format!("{} stage-2 vertices, both idempotent with image the oracle, kernels differ", stage.len()))
}

fn criterion_7() -> Outcome {
    let d = dashv(&complete_digraph(3)).map_err(e2s)?;
    let a = count_automorphisms_with_cap(&d, d.len()).map_err(e2s)?;
    let p4 = prime(&complete_graph(4)).map_err(e2s)?;
    let b = count_automorphisms_with_cap(&p4, p4.len()).map_err(e2s)?;
    let p3 = prime(&complete_graph(3)).map_err(e2s)?;
    let c = count_automorphisms_with_cap(&p3, p3.len()).map_err(e2s)?;
    ensure(a == 6 && b == 24 && c == 12, format!("dashv {a}, prime(K4) {b}, prime(K3) {c}"))?;
    Ok(format!("|Aut dashv(D3)| = {a}, |Aut prime(K4)| = {b}, |Aut prime(K3)| = {c} != 6"))
}

fn criterion_8() -> Outcome {
    let k3 = complete_graph(3);
    let family: Vec<IndexSet> = [&[4][..], &[2, 4], &[3, 4], &[2, 3, 4]].iter().map(|x| set(x)).collect();
    let deltas: Vec<Structure> =
        family.iter().map(|sset| delta_construction(&k3, sset, 6)).collect::<Result<_, _>>().map_err(e2s)?;
    let mut orders = Vec::new();
    for d in &deltas {
        orders.push(count_automorphisms_with_cap(d, d.len()).map_err(e2s)?);
    }
    let mut iso_pairs = Vec::new();
    for i in 0..deltas.len() {
        for j in i + 1..deltas.len() {
            if isomorphic_with_cap(&deltas[i], &deltas[j], 16).map_err(e2s)? {
                iso_pairs.push(format!("{} ~ {}", family[i], family[j]));
            }
        }
    }
    let shown: Vec<String> = family.iter().zip(&orders).map(|(f, o)| format!("{f}: {o}")).collect();
    let detail = format!("|Aut| {}; isomorphic pairs: {}", shown.join(", "), if iso_pairs.is_empty() { "none".into() } else { iso_pairs.join(", ") });
    ensure(iso_pairs.is_empty() && orders.iter().all(|&o| o == 6), detail.clone())?;
    Ok(detail)
}

fn criterion_9() -> Outcome {
    let k2 = complete_graph(2);
    let sharp = blowup(&k2, 2).map_err(e2s)?;
    let k22 = complete_bipartite(2, 2);
    let k22_graph = Structure::graph(k22.vertices().iter().cloned(), k22.edges()).map_err(e2s)?;
    ensure(isomorphic_with_cap(&sharp, &k22_graph, 4).map_err(e2s)?, "blowup(K2, 2) is not K_{2,2}")?;
    for code in 0..4usize {
        let b = [code & 1, code >> 1 & 1];
        let phi = phi_b(&sharp, &b).map_err(e2s)?;
        let psi = psi_b(&sharp, &b).map_err(e2s)?;
        ensure(check_homomorphism(&phi, &sharp, &sharp) && phi.then(&phi) == phi, format!("phi_{b:?} is not an idempotent endomorphism"))?;
        ensure(check_embedding(&psi, &sharp, &sharp), format!("psi_{b:?} is not an automorphism"))?;
        ensure(psi.then(&psi) == VertexMap::identity(&sharp), format!("psi_{b:?} is not an involution"))?;
    }
    let mut checked = 0;
    for n in 1..=4 {
        for g in all_graphs(n) {
            let big = blowup(&g, 2).map_err(e2s)?;
            let base: Vec<VertexName> = g.vertices().iter().cloned().collect();
            for code in 0..1usize << base.len() {
                let diag: BTreeSet<VertexName> = base.iter().enumerate().map(|(i, v)| blown(v, code >> i & 1)).collect();
                let sub = induced(&big, &diag).map_err(e2s)?;
                ensure(isomorphic_with_cap(&sub, &g, 4).map_err(e2s)?, format!("diagonal {code:b} of blowup({g:?})"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("K_{{2,2}}; 4 selectors; {checked} diagonals isomorphic to their base"))
}

fn components(g: &Structure) -> Vec<BTreeSet<VertexName>> {
    let mut left: BTreeSet<VertexName> = g.vertices().clone();
    let mut out = Vec::new();
    while let Some(start) = left.iter().next().cloned() {
        let mut comp = BTreeSet::from([start.clone()]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for u in g.neighbors(&v) {
                if comp.insert(u.clone()) {
                    stack.push(u.clone());
                }
            }
        }
        left.retain(|v| !comp.contains(v));
        out.push(comp);
    }
    out
}

fn criterion_10() -> Outcome {
    let k2 = complete_graph(2);
    let caps = SchutzCaps { subset_size: 2, ..SchutzCaps::default() };
    let pair = schutz_pair(&k2, &[set(&[2])], 1, &caps).map_err(e2s)?;
    for (u, v) in pair.e_star.edges() {
        ensure(pair.e_zero.adjacent(&u, &v), format!("E* edge {u}-{v} missing from E0"))?;
    }
    let co = complement(&pair.e_zero);
    let witnesses = pair.stages[0].witnesses.len();
    let m = build_m(&set(&[2]), caps.l_len, witnesses);
    let mut shapes = Vec::new();
    for comp in components(&co) {
        let sub = induced(&co, &comp).map_err(e2s)?;
        if sub.len() == 2 && isomorphic_with_cap(&sub, &k2, 2).map_err(e2s)? {
            shapes.push("K2".to_string());
        } else if sub.len() == m.len() && isomorphic_with_cap(&sub, &m, m.len()).map_err(e2s)? {
            shapes.push(format!("M_{{2}}({}, {witnesses})", caps.l_len));
        } else {
            return Err(format!("unexpected complement component with {} vertices", sub.len()));
        }
    }
    shapes.sort();
    ensure(shapes.len() == 2 && shapes[0] == "K2", format!("components {shapes:?}"))?;

    // The greedy map needs a target with a second witness stage.
    let source = limit(&k2, StagePlan::exact(1)).map_err(e2s)?.finite_stage(1).map_err(e2s)?;
    let target = schutz_pair(&k2, &[set(&[2]), set(&[3])], 2, &caps).map_err(e2s)?;
    let report = greedy_injective_hom(&source, &target, &[]).map_err(e2s)?;
    ensure(report.injective && report.homomorphism_into_e_zero && report.embedding_into_e_star, "greedy map is not an injective homomorphism")?;
    Ok(format!(
        "E* in E0, complement components {shapes:?}; greedy map on {} vertices injective, {} E0-only image pairs",
        source.len(),
        report.discrepancies.len()
    ))
}

fn criterion_11() -> Outcome {
    let k11 = complete_bipartite(1, 1);
    let mut graphs = 0;
    for total in 2..=6u32 {
        for a in 1..total {
            for g in all_bipartite(a, total - a).into_iter().filter(connected) {
                graphs += 1;
                let vs: Vec<VertexName> = g.vertices().iter().cloned().collect();
                let parts: BTreeSet<BTreeSet<VertexName>> =
                    [g.part_members(0), g.part_members(1)].into_iter().filter(|p| !p.is_empty()).collect();
                let mut onto = 0;
                for code in 0..1usize << vs.len() {
                    let f: VertexMap = vs.iter().enumerate().map(|(i, v)| (v.clone(), s((code >> i & 1) as u32))).collect();
                    if !check_homomorphism(&f, &g, &k11) || f.image_set().len() != 2 {
                        continue;
                    }
                    onto += 1;
                    let ker: BTreeSet<BTreeSet<VertexName>> = kernel(&f, &g).into_iter().collect();
                    ensure(ker == parts, format!("kernel differs from the parts on {g:?}"))?;
                }
                let ordered_edges = 2 * k11.edge_count();
                ensure(onto == ordered_edges, format!("{onto} maps onto K11 from {g:?}"))?;
                // Retractions onto an edge are determined by the edge.
                for (u, v) in g.edges() {
                    let mut count = 0;
                    for code in 0..1usize << vs.len() {
                        let f: VertexMap = vs
                            .iter()
                            .enumerate()
                            .map(|(i, x)| (x.clone(), if code >> i & 1 == 0 { u.clone() } else { v.clone() }))
                            .collect();
                        if f.get(&u) == Some(&u) && f.get(&v) == Some(&v) && check_homomorphism(&f, &g, &g) {
                            count += 1;
                        }
                    }
                    ensure(count == 1, format!("{count} retractions onto {u}-{v} in {g:?}"))?;
                }
            }
        }
    }
    ensure(graphs > 0, "no graphs enumerated")?;
    Ok(format!("{graphs} connected bipartite graphs: 2 maps onto K11 each, kernel = parts; one retraction per edge"))
}

fn main() {
    let criteria: Vec<(u32, fn() -> Outcome, Duration)> = vec![
        (1, criterion_1, Duration::from_secs(60)),
        (2, criterion_2, Duration::from_secs(1)),
        (3, criterion_3, Duration::from_secs(10)),
        (4, criterion_4, Duration::from_secs(1)),
        (5, criterion_5, Duration::from_secs(5)),
        (6, criterion_6, Duration::from_secs(30)),
        (7, criterion_7, Duration::from_secs(10)),
        (8, criterion_8, Duration::from_secs(30)),
        (9, criterion_9, Duration::from_secs(30)),
        (10, criterion_10, Duration::from_secs(10)),
        (11, criterion_11, Duration::from_secs(10)),
    ];
    let mut failed = Vec::new();
    for (n, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(d) if took > budget => Err(format!("{d} (took {took:.2?}, budget {budget:?})")),
            other => other,
        };
        match &outcome {
            Ok(detail) => println!("criterion {n:>2}: PASS ({took:.2?}) {detail}"),
            Err(detail) => {
                let tag = if KNOWN_FAILURES.contains(&n) { " [known]" } else { "" };
                println!("criterion {n:>2}: FAIL{tag} ({took:.2?}) {detail}");
                failed.push(n);
            }
        }
    }
    let unexpected: Vec<u32> = failed.iter().copied().filter(|n| !KNOWN_FAILURES.contains(n)).collect();
    let recovered: Vec<u32> = KNOWN_FAILURES.iter().copied().filter(|n| !failed.contains(n)).collect();
    println!("acceptance: {} of 11 criteria pass; known failures {KNOWN_FAILURES:?}", 11 - failed.len());
    if !unexpected.is_empty() || !recovered.is_empty() {
        eprintln!("unexpected failures {unexpected:?}; known failures now passing {recovered:?}");
        std::process::exit(1);
    }
}
