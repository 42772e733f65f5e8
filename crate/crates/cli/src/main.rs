//! `forge`: build and probe universal graphs, gadgets and endomorphism monoids.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};
use fraisse_core::constructions::{
    blowup, build_l, build_l_directed, build_lambda, build_m, build_n, dashv, delta_construction, prime, schutz_pair,
    IndexSet, SchutzCaps, SchutzPair,
};
use fraisse_core::endomorphism::{greedy_injective_hom, ChoiceSequence, LimitEndomorphism, SeedMap};
use fraisse_core::green::{
    eggbox, enumerate_endos_with_caps, green_relations, maximal_subgroup, schutzenberger,
    verify_green_structure_with_caps, DEFAULT_ELEMENT_CAP, DEFAULT_VERTEX_CAP,
};
use fraisse_core::universal::{lazy_delta, limit, AcOracle, IndexRule, LazyLimit, ScheduleMode, StagePlan};
use fraisse_core::{
    ac_check, complete_bipartite, complete_digraph, complete_graph, from_json, path_graph, to_dot, ForgeError, Kind,
    Structure, VertexMap, VertexName,
};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "forge", version, about = "Universal graphs, gadgets and endomorphism monoids")]
struct Cli {
    /// Emit Graphviz DOT instead of JSON (structure outputs only).
    #[arg(long, global = true)]
    dot: bool,
    /// Write output to this file instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a named finite structure.
    Construct(ConstructArgs),
    /// Materialise a finite stage of the witness limit over a seed.
    Stage(StageArgs),
    /// Earliest vertex joined to all of U and to none of V.
    EcWitness(EcArgs),
    /// Extend a seed map to an endomorphism and print its restriction to a stage.
    Extend(ExtendArgs),
    /// Check that an extension is idempotent up to a stage.
    VerifyIdem(ExtendArgs),
    /// Witness-counting check on a finite structure.
    AcCheck(AcArgs),
    /// Green's relations of the endomorphism monoid of a small structure.
    Green(GreenArgs),
    /// Finite truncation of the E*/E0 pair over a base graph.
    SchutzPair(PairArgs),
    /// Greedy injective map of a finite graph into E*.
    GreedyHom(GreedyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Gadget {
    /// L_S truncated at N.
    #[value(name = "L")]
    L,
    /// Directed L_S.
    #[value(name = "L-directed")]
    LDirected,
    /// Bipartite Λ_S.
    #[value(name = "Lambda")]
    Lambda,
    /// M_S with K apexes.
    #[value(name = "M")]
    M,
    /// N_S with K apexes.
    #[value(name = "N")]
    N,
    /// complement(base ∪ L_S).
    Delta,
    /// r-fold blow-up of a base graph.
    Blowup,
    /// Arc gadget over a base digraph.
    Dashv,
    /// Pendant-path gadget over a base graph.
    Prime,
    /// Complete graph K_n.
    Complete,
    /// Complete digraph on n vertices.
    CompleteDigraph,
    /// Complete bipartite K_{a,b}.
    CompleteBipartite,
    /// Path on n vertices.
    Path,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(value_enum, ignore_case = true)]
    name: Gadget,
    /// Index set, e.g. "2,4,5".
    #[arg(long = "S")]
    s: Option<String>,
    /// Truncation length.
    #[arg(long = "N")]
    n_len: Option<u64>,
    /// Number of apex vertices for M and N.
    #[arg(long = "K", default_value_t = 1)]
    k: usize,
    /// Size parameter for complete graphs and paths.
    #[arg(long)]
    n: Option<u32>,
    /// Part sizes for complete bipartite graphs.
    #[arg(long)]
    a: Option<u32>,
    #[arg(long)]
    b: Option<u32>,
    /// Blow-up factor.
    #[arg(long)]
    r: Option<usize>,
    /// Base structure (JSON) for delta, blowup, dashv and prime.
    #[arg(long)]
    base: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct LimitArgs {
    /// Seed structure (JSON).
    #[arg(long)]
    seed: PathBuf,
    /// Number of witness stages to plan.
    #[arg(long, default_value_t = 2)]
    stages: u32,
    /// Largest subset receiving a witness.
    #[arg(long)]
    cap: Option<usize>,
    /// Only subsets meeting the previous stage's new vertices receive witnesses.
    #[arg(long, requires = "cap")]
    fresh: bool,
}

#[derive(Args, Debug)]
struct StageArgs {
    #[command(flatten)]
    limit: LimitArgs,
    /// Expected kind of the seed.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Stage to materialise (defaults to the last planned stage).
    #[arg(long)]
    stage: Option<u32>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    Graph,
    Digraph,
    Bipartite,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Graph => Kind::Graph,
            KindArg::Digraph => Kind::Digraph,
            KindArg::Bipartite => Kind::Bipartite,
        }
    }
}

#[derive(Args, Debug)]
struct EcArgs {
    #[command(flatten)]
    limit: LimitArgs,
    /// Vertices the witness must be joined to (for digraphs: arcs witness -> u).
    #[arg(long, default_value = "")]
    u: String,
    /// Vertices the witness must avoid.
    #[arg(long, default_value = "")]
    v: String,
    /// Digraphs: arcs u -> witness.
    #[arg(long = "in", default_value = "")]
    inward: String,
    /// Digraphs: arcs in both directions.
    #[arg(long, default_value = "")]
    both: String,
    /// Bipartite: part of the witness when U is empty.
    #[arg(long)]
    part: Option<u8>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ExtendMode {
    Generic,
    Image,
    Auto,
    Idem,
}

#[derive(Args, Debug)]
struct ExtendArgs {
    #[command(flatten)]
    limit: LimitArgs,
    #[arg(long, value_enum, default_value = "generic")]
    mode: ExtendMode,
    /// JSON object mapping seed vertices to their images (identity if omitted).
    #[arg(long)]
    seed_map: Option<PathBuf>,
    /// Choice sequence: "2", "0,1,0" or "1.2=1,2.0=3".
    #[arg(long, default_value = "")]
    choices: String,
    /// Stage to restrict to.
    #[arg(long, default_value_t = 1)]
    stage: u32,
    /// Only the scheduled item's images constrain each witness.
    #[arg(long)]
    non_strict: bool,
    /// Image structure (JSON) for `--mode image`.
    #[arg(long)]
    image: Option<PathBuf>,
    /// Build the limit over the lazy delta oracle of the seed with this index set.
    #[arg(long)]
    delta: Option<String>,
}

#[derive(Args, Debug)]
struct AcArgs {
    file: PathBuf,
    /// Required number of witnesses per subset.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Largest subset size tested.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Report {
    Classes,
    Idempotents,
    Schutz,
    Verify,
}

#[derive(Args, Debug)]
struct GreenArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "classes")]
    report: Report,
}

#[derive(Args, Debug)]
struct PairArgs {
    /// Base graph (JSON).
    #[arg(long)]
    seed: PathBuf,
    /// Index sets per stage, separated by ';', e.g. "2;3,4".
    #[arg(long = "S")]
    s: String,
    #[arg(long, default_value_t = 1)]
    stages: usize,
    /// Largest subset receiving a witness.
    #[arg(long, default_value_t = 2)]
    subset_size: usize,
    /// Truncation length of each L_S.
    #[arg(long = "N", default_value_t = 4)]
    n_len: u64,
}

#[derive(Args, Debug)]
struct GreedyArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Source graph (JSON).
    #[arg(long)]
    source: PathBuf,
    /// Forced assignment "source=target"; repeatable.
    #[arg(long)]
    force: Vec<String>,
}

fn forge_cap(default: usize) -> Result<usize> {
    match std::env::var("FORGE_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| anyhow!(ForgeError::Invalid(format!("FORGE_CAP={v:?} is not a number")))),
        Err(_) => Ok(default),
    }
}

fn read_structure(path: &Path) -> Result<Structure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn index_set(text: &str) -> Result<IndexSet> {
    let items: Vec<u64> = text
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().map_err(|_| ForgeError::Invalid(format!("{x:?} is not an index"))))
        .collect::<Result<_, _>>()?;
    Ok(IndexSet::new(items)?)
}

/// Splits at commas outside brackets, so gadget names with parents survive.
fn split_top(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out.into_iter().map(str::trim).filter(|x| !x.is_empty()).collect()
}

/// A vertex name; a single letter `a`, `b`, ... abbreviates the seed `s0`, `s1`, ...
fn vertex(text: &str) -> Result<VertexName> {
    let t = text.trim();
    let mut chars = t.chars();
    if let (Some(c @ 'a'..='z'), None) = (chars.next(), chars.next()) {
        return Ok(VertexName::seed(c as u32 - 'a' as u32));
    }
    Ok(t.parse()?)
}

fn vertex_set(text: &str) -> Result<BTreeSet<VertexName>> {
    split_top(text).into_iter().map(vertex).collect()
}

fn build_limit(args: &LimitArgs) -> Result<(Structure, LazyLimit)> {
    let seed = read_structure(&args.seed)?;
    let plan = plan_for(args);
    let lim = limit(&seed, plan)?;
    Ok((seed, lim))
}

fn plan_for(args: &LimitArgs) -> StagePlan {
    match args.cap {
        None => StagePlan::exact(args.stages),
        Some(cap) => {
            let mode = if args.fresh { ScheduleMode::Fresh } else { ScheduleMode::Exact };
            StagePlan::capped(args.stages, cap, mode)
        }
    }
}

fn structure_output(g: &Structure, dot: bool) -> Result<String> {
    Ok(if dot { to_dot(g) } else { serde_json::to_string_pretty(g)? })
}

fn json_only(dot: bool, what: &str) -> Result<()> {
    if dot {
        bail!(ForgeError::Invalid(format!("--dot applies to structure outputs, not to {what}")));
    }
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn construct(args: &ConstructArgs, dot: bool) -> Result<String> {
    let need_s = || -> Result<IndexSet> {
        index_set(args.s.as_deref().ok_or_else(|| ForgeError::Invalid("--S is required for this construction".into()))?)
    };
    let need_n = || args.n_len.ok_or_else(|| anyhow!(ForgeError::Invalid("--N is required for this construction".into())));
    let need_base = || -> Result<Structure> {
        read_structure(args.base.as_deref().ok_or_else(|| ForgeError::Invalid("--base is required for this construction".into()))?)
    };
    let size = |v: Option<u32>, flag: &str| v.ok_or_else(|| anyhow!(ForgeError::Invalid(format!("--{flag} is required"))));
    let g = match args.name {
        Gadget::L => build_l(&need_s()?, need_n()?),
        Gadget::LDirected => build_l_directed(&need_s()?, need_n()?),
        Gadget::Lambda => build_lambda(&need_s()?, need_n()?),
        Gadget::M => build_m(&need_s()?, need_n()?, args.k),
        Gadget::N => build_n(&need_s()?, need_n()?, args.k),
        Gadget::Delta => delta_construction(&need_base()?, &need_s()?, need_n()?)?,
        Gadget::Blowup => {
            let r = args.r.ok_or_else(|| ForgeError::Invalid("--r is required for blowup".into()))?;
            blowup(&need_base()?, r)?
        }
        Gadget::Dashv => dashv(&need_base()?)?,
        Gadget::Prime => prime(&need_base()?)?,
        Gadget::Complete => complete_graph(size(args.n, "n")?),
        Gadget::CompleteDigraph => complete_digraph(size(args.n, "n")?),
        Gadget::CompleteBipartite => complete_bipartite(size(args.a, "a")?, size(args.b, "b")?),
        Gadget::Path => path_graph(size(args.n, "n")?),
    };
    structure_output(&g, dot)
}

fn stage(args: &StageArgs, dot: bool) -> Result<String> {
    let (seed, lim) = build_limit(&args.limit)?;
    if let Some(k) = args.kind {
        if Kind::from(k) != seed.kind() {
            bail!(ForgeError::KindMismatch { expected: k.into(), found: seed.kind() });
        }
    }
    let n = args.stage.unwrap_or(args.limit.stages);
    structure_output(&lim.finite_stage(n)?, dot)
}

fn ec_witness(args: &EcArgs, dot: bool) -> Result<String> {
    json_only(dot, "ec-witness")?;
    let (seed, lim) = build_limit(&args.limit)?;
    let (u, v) = (vertex_set(&args.u)?, vertex_set(&args.v)?);
    let w = if seed.kind() == Kind::Digraph {
        lim.find_ec_witness_digraph(&u, &vertex_set(&args.inward)?, &vertex_set(&args.both)?, &v)?
    } else {
        if !args.inward.is_empty() || !args.both.is_empty() {
            bail!(ForgeError::Invalid("--in and --both apply to digraph seeds only".into()));
        }
        lim.find_ec_witness_in_part(&u, &v, args.part)?
    };
    let stage = w.as_witness().map_or(0, |(n, _)| n);
    pretty(&json!({ "witness": w, "stage": stage }))
}

fn seed_map(path: Option<&Path>) -> Result<SeedMap> {
    let Some(path) = path else { return Ok(SeedMap::Identity) };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: BTreeMap<String, String> = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let map: VertexMap = raw.iter().map(|(k, v)| Ok((vertex(k)?, vertex(v)?))).collect::<Result<_>>()?;
    Ok(SeedMap::Table(map))
}

fn endomorphism(args: &ExtendArgs, mode: ExtendMode) -> Result<LimitEndomorphism> {
    let seed = read_structure(&args.limit.seed)?;
    let plan = plan_for(&args.limit);
    let base = Arc::new(match &args.delta {
        Some(s) => {
            let oracle: Arc<dyn AcOracle> = Arc::new(lazy_delta(&seed, IndexRule::finite(index_set(s)?))?);
            LazyLimit::new(oracle, seed.len(), plan)?
        }
        None => limit(&seed, plan)?,
    });
    let choices: ChoiceSequence = args.choices.parse()?;
    let f0 = seed_map(args.seed_map.as_deref())?;
    Ok(match mode {
        ExtendMode::Generic => LimitEndomorphism::extend_hom(base, f0, choices, !args.non_strict)?,
        ExtendMode::Image => {
            let path = args.image.as_deref().ok_or_else(|| ForgeError::Invalid("--mode image requires --image".into()))?;
            let image: Arc<dyn AcOracle> = Arc::new(read_structure(path)?);
            LimitEndomorphism::extend_hom_image_preserving(base, f0, image, choices)?
        }
        ExtendMode::Auto => LimitEndomorphism::extend_automorphism(base, f0)?,
        ExtendMode::Idem => {
            if args.seed_map.is_some() {
                bail!(ForgeError::Invalid("--mode idem fixes the seed; drop --seed-map".into()));
            }
            LimitEndomorphism::idempotent_onto(base, choices)?
        }
    })
}

fn extend(args: &ExtendArgs, dot: bool) -> Result<String> {
    json_only(dot, "extend")?;
    let e = endomorphism(args, args.mode)?;
    let r = e.restrict(args.stage)?;
    pretty(&json!({ "mode": e.mode(), "stage": r.stage, "map": r.map }))
}

fn verify_idem(args: &ExtendArgs, dot: bool) -> Result<(String, bool)> {
    json_only(dot, "verify-idem")?;
    let e = endomorphism(args, args.mode)?;
    let bad = e.verify_idempotent(args.stage)?;
    let out = pretty(&json!({ "idempotent": bad.is_none(), "counterexample": bad, "stage": args.stage }))?;
    Ok((out, bad.is_none()))
}

fn green(args: &GreenArgs, dot: bool) -> Result<(String, bool)> {
    json_only(dot, "green")?;
    let g = read_structure(&args.file)?;
    let cap = forge_cap(DEFAULT_ELEMENT_CAP)?;
    if let Report::Verify = args.report {
        let report = verify_green_structure_with_caps(&g, DEFAULT_VERTEX_CAP, cap)?;
        return Ok((pretty(&report)?, report.passed()));
    }
    let m = enumerate_endos_with_caps(&g, DEFAULT_VERTEX_CAP, cap)?;
    let gd = green_relations(&m);
    let out = match args.report {
        Report::Classes => pretty(&eggbox(&m, &gd))?,
        Report::Idempotents => {
            let rows = m
                .idempotents()
                .into_iter()
                .map(|e| {
                    let image: BTreeSet<VertexName> = m.to_map(e).image_set();
                    Ok(json!({
                        "map": m.to_map(e),
                        "rank": m.rank(e),
                        "image": image,
                        "d_class": gd.d[e],
                        "group_order": maximal_subgroup(&m, &gd, e)?.order(),
                    }))
                })
                .collect::<Result<Vec<Value>>>()?;
            pretty(&rows)?
        }
        Report::Schutz => {
            let mut seen = BTreeSet::new();
            let mut rows = Vec::new();
            for a in 0..m.len() {
                if seen.insert(gd.d[a]) {
                    let s = schutzenberger(&m, &gd, a);
                    rows.push(json!({
                        "d_class": gd.d[a],
                        "representative": m.to_map(a),
                        "regular": gd.regular[a],
                        "order": s.order(),
                        "permutations": s.permutations,
                    }));
                }
            }
            pretty(&rows)?
        }
        Report::Verify => unreachable!(),
    };
    Ok((out, true))
}

fn pair_for(args: &PairArgs) -> Result<SchutzPair> {
    let g = read_structure(&args.seed)?;
    let s_seq: Vec<IndexSet> = args.s.split(';').map(index_set).collect::<Result<_>>()?;
    let caps = SchutzCaps {
        subset_size: args.subset_size,
        l_len: args.n_len,
        max_vertices: forge_cap(SchutzCaps::default().max_vertices)?,
    };
    Ok(schutz_pair(&g, &s_seq, args.stages, &caps)?)
}

fn schutz(args: &PairArgs, dot: bool) -> Result<String> {
    let pair = pair_for(args)?;
    if dot {
        return Ok(format!("{}\n{}", to_dot(&pair.e_star), to_dot(&pair.e_zero)));
    }
    let stages: Vec<Value> = pair
        .stages
        .iter()
        .map(|st| {
            let ws: Vec<Value> = st.witnesses.iter().map(|(w, a)| json!({ "witness": w, "subset": a })).collect();
            json!({ "l_vertices": st.l_vertices, "witnesses": ws })
        })
        .collect();
    pretty(&json!({ "base": pair.base, "e_star": pair.e_star, "e_zero": pair.e_zero, "stages": stages }))
}

fn greedy(args: &GreedyArgs, dot: bool) -> Result<String> {
    json_only(dot, "greedy-hom")?;
    let pair = pair_for(&args.pair)?;
    let source = read_structure(&args.source)?;
    let forced: Vec<(VertexName, VertexName)> = args
        .force
        .iter()
        .map(|f| {
            let (a, b) = f.split_once('=').ok_or_else(|| ForgeError::Invalid(format!("--force {f:?} is not source=target")))?;
            Ok((vertex(a)?, vertex(b)?))
        })
        .collect::<Result<_>>()?;
    let report = greedy_injective_hom(&source, &pair, &forced)?;
    pretty(&json!({
        "map": report.map,
        "injective": report.injective,
        "embedding_into_e_star": report.embedding_into_e_star,
        "homomorphism_into_e_zero": report.homomorphism_into_e_zero,
        "image_differs": report.image_differs(),
        "discrepancies": report.discrepancies,
    }))
}

fn ac(args: &AcArgs, dot: bool) -> Result<(String, bool)> {
    json_only(dot, "ac-check")?;
    let g = read_structure(&args.file)?;
    let report = ac_check(&g, args.m, args.k);
    Ok((pretty(&report)?, true))
}

/// Output text and whether the run reports success.
fn run(cli: &Cli) -> Result<(String, bool)> {
    let dot = cli.dot;
    Ok(match &cli.command {
        Command::Construct(a) => (construct(a, dot)?, true),
        Command::Stage(a) => (stage(a, dot)?, true),
        Command::EcWitness(a) => (ec_witness(a, dot)?, true),
        Command::Extend(a) => (extend(a, dot)?, true),
        Command::VerifyIdem(a) => verify_idem(a, dot)?,
        Command::AcCheck(a) => ac(a, dot)?,
        Command::Green(a) => green(a, dot)?,
        Command::SchutzPair(a) => (schutz(a, dot)?, true),
        Command::GreedyHom(a) => (greedy(a, dot)?, true),
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<ForgeError>() {
            return match e {
                ForgeError::Json(_) => 65,
                e if e.is_exhaustion() => 3,
                _ => 2,
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return 65;
        }
    }
    2
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse_from(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand => 64,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((text, ok)) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display())),
                None => writeln!(std::io::stdout(), "{text}").context("writing stdout"),
            };
            if let Err(e) = written {
                let closed = e
                    .downcast_ref::<std::io::Error>()
                    .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe);
                if !closed {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(2);
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
