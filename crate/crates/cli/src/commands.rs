use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use qkneser::families::{
    coloring_23_line, coloring_23_mixed, coloring_23_plane, covering_24, default_plane_setup, e0_23, e0_24, e1_23,
    e1_24, ekr_by_ids, line_plane_identity, verify_coloring, verify_family, Coloring, EkrKind, FamilyError, FlagFamily,
    PlaneSetup,
};
use qkneser::geometry::{flag_count, gaussian, theta, GeometryError, SubspaceJson};
use qkneser::kneser::{GraphId, KneserError};
use qkneser::search::{
    heavy_solid_check, hm_falsifier, kneser_chromatic_bounds, kneser_independence_number, HeavySolidInstance,
    SearchBudget, SearchError,
};
use qkneser::{FieldTable, FlagSpace, FlagType, KneserGraph, ProjectiveSpace};

use crate::{BudgetArgs, Cli, Command, GraphArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Runtime(_) | CliError::Io(_) => 4,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::EnumerationLimitExceeded { .. } => {
                CliError::Invalid(format!("{e} (raise it with --limit or QKNESER_LIMIT)"))
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<KneserError> for CliError {
    fn from(e: KneserError) -> Self {
        match e {
            KneserError::Io(e) => CliError::Io(e),
            KneserError::Geometry(e) => e.into(),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Geometry(e) => e.into(),
            FamilyError::Graph(e) => e.into(),
            FamilyError::GraphMismatch(_) => CliError::Verification(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Geometry(e) => e.into(),
            SearchError::Graph(e) => e.into(),
            SearchError::Family(e) => e.into(),
            SearchError::ThreadPool(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// A family together with the graph it lives in, as written by `ekr`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub graph: GraphId,
    pub family: FlagFamily,
}

struct Ctx {
    limit: usize,
    threads: usize,
}

impl Ctx {
    fn geometry(&self, q: u32, n: usize) -> Result<Arc<ProjectiveSpace>> {
        Ok(Arc::new(ProjectiveSpace::with_limit(q, n, self.limit)?))
    }

    fn flags(&self, q: u32, dims: &[u8]) -> Result<FlagSpace> {
        let geo = self.geometry(q, 5)?;
        Ok(FlagSpace::new(geo, FlagType::new(5, dims)?)?)
    }

    fn graph(&self, args: &GraphArgs) -> Result<KneserGraph> {
        let omega = FlagType::parse(args.n, &args.omega)?;
        Ok(KneserGraph::build(args.q, args.n, &omega, self.limit)?)
    }

    fn graph_of(&self, id: &GraphId) -> Result<KneserGraph> {
        let q = u32::try_from(id.q).map_err(|_| CliError::Invalid(format!("field order {}", id.q)))?;
        Ok(KneserGraph::build(q, id.n, &id.omega, self.limit)?)
    }

    fn budget(&self, b: &BudgetArgs) -> SearchBudget {
        SearchBudget {
            max_nodes: b.max_nodes,
            max_seconds: b.max_seconds,
            threads: self.threads,
            seed: b.seed,
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let threads = match cli.threads {
        Some(0) => return Err(CliError::Invalid("--threads must be positive".into())),
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let ctx = Ctx {
        limit: cli.limit,
        threads,
    };
    match cli.command {
        Command::Counts { q, n } => counts(q, n),
        Command::Graph { graph, out } => cmd_graph(&ctx, &graph, out.as_deref()),
        Command::Color {
            q,
            construction,
            solid,
            line,
            plane,
            line0,
            w,
            r,
            seed,
            classes_expected,
            out,
        } => {
            let spec = ColorSpec {
                construction,
                solid,
                line,
                plane,
                line0,
                w,
                r,
                seed,
            };
            color(&ctx, q, &spec, classes_expected, out.as_deref())
        }
        Command::Ekr { q, kind, a, b, out } => ekr(&ctx, q, &kind, &a, &b, out.as_deref()),
        Command::Verify { files } => verify(&ctx, &files),
        Command::Alpha {
            graph,
            budget,
            require_exact,
        } => alpha(&ctx, &graph, &budget, require_exact),
        Command::Chi {
            graph,
            budget,
            require_exact,
        } => chi(&ctx, &graph, &budget, require_exact),
        Command::Falsify {
            graph,
            restarts,
            max_seconds,
            seed,
        } => falsify(&ctx, &graph, restarts, max_seconds, seed),
        Command::Identity { q_max } => identity(q_max),
        Command::HeavySolid {
            q,
            points,
            random,
            seed,
            p,
            m,
            n,
        } => heavy_solid(&ctx, q, points, random, seed, &p, m, n),
    }
}

fn emit(value: &impl Serialize, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}")?;
        }
    }
    Ok(())
}

/// A subspace given as a catalog index or as inline subspace JSON.
fn subspace_id(geo: &ProjectiveSpace, dim: usize, arg: &str) -> Result<u32> {
    if let Ok(i) = arg.trim().parse::<u32>() {
        let len = geo.catalog(dim)?.len();
        if i as usize >= len {
            return Err(CliError::Invalid(format!(
                "index {i} out of range for {len} subspaces of dimension {dim}"
            )));
        }
        return Ok(i);
    }
    let doc: SubspaceJson = serde_json::from_str(arg)
        .map_err(|e| CliError::Invalid(format!("{arg:?} is neither an index nor subspace JSON: {e}")))?;
    let s = doc.to_subspace(geo.field())?;
    if s.ambient() != geo.n() || s.dim() != dim {
        return Err(CliError::Invalid(format!(
            "expected a subspace of dimension {dim} in dimension {}, got dimension {} in dimension {}",
            geo.n(),
            s.dim(),
            s.ambient()
        )));
    }
    Ok(geo.id_of(&s)?.1)
}

fn counts(q: u32, n: usize) -> Result<()> {
    FieldTable::new(q).map_err(|e| CliError::Invalid(e.to_string()))?;
    if !(1..=7).contains(&n) {
        return Err(CliError::Invalid(format!("dimension {n} unsupported (1..=7)")));
    }
    let qq = q as u64;
    let nn = n as u32;
    let gaussians: Vec<Vec<u128>> = (0..=nn)
        .map(|m| (0..=m).map(|k| gaussian(m, k, qq)).collect())
        .collect();
    let thetas: Vec<u128> = (0..nn).map(|m| theta(m, qq)).collect();
    let mut flags = BTreeMap::new();
    for dims in [[2u8, 3], [2, 4]] {
        if (dims[1] as usize) < n {
            flags.insert(format!("{{{},{}}}", dims[0], dims[1]), flag_count(nn, &dims, qq));
        }
    }
    let mut doc = json!({ "q": q, "n": n, "gaussian": gaussians, "theta": thetas, "flags": flags });
    if n == 5 {
        doc["constants"] = json!({
            "e0_23": e0_23(qq),
            "e1_23": e1_23(qq),
            "e0_24": e0_24(qq),
            "e1_24": e1_24(qq),
        });
    }
    emit(&doc, None)?;
    eprintln!("q = {q}, n = {n}");
    for (m, row) in gaussians.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|g| g.to_string()).collect();
        eprintln!("  [{m} k]: {}", cells.join(" "));
    }
    for (name, count) in &flags {
        eprintln!("  flags {name}: {count}");
    }
    if n == 5 {
        eprintln!(
            "  e0_23 = {}, e1_23 = {}, e0_24 = {}, e1_24 = {}",
            e0_23(qq),
            e1_23(qq),
            e0_24(qq),
            e1_24(qq)
        );
    }
    Ok(())
}

fn cmd_graph(ctx: &Ctx, args: &GraphArgs, out: Option<&Path>) -> Result<()> {
    let g = ctx.graph(args)?;
    let meta = g.meta();
    match out {
        Some(path) => {
            g.export_dimacs(path)?;
            emit(&meta, None)?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            g.write_dimacs(&mut w)?;
            w.flush()?;
        }
    }
    eprintln!(
        "qK_{{{};{}}} over GF({}): {} vertices, {} edges, degree {}",
        meta.n,
        meta.omega,
        meta.q,
        meta.vertices,
        meta.edges,
        meta.degree.map_or("irregular".to_string(), |d| d.to_string())
    );
    Ok(())
}

struct ColorSpec {
    construction: String,
    solid: String,
    line: Option<String>,
    plane: Option<String>,
    line0: Option<String>,
    w: Vec<u32>,
    r: u64,
    seed: u64,
}

fn build_coloring(ctx: &Ctx, q: u32, spec: &ColorSpec) -> Result<Coloring> {
    let dims: &[u8] = if spec.construction == "covering24" {
        &[2, 4]
    } else {
        &[2, 3]
    };
    let fs = ctx.flags(q, dims)?;
    let geo = fs.geometry().clone();
    let solid = subspace_id(&geo, 4, &spec.solid)?;
    let line = |geo: &ProjectiveSpace| -> Result<u32> {
        match &spec.line {
            Some(l) => subspace_id(geo, 2, l),
            None => Ok(geo.subsets(geo.space((4, solid))?, 2)?[0]),
        }
    };
    let coloring = match spec.construction.as_str() {
        "covering24" => covering_24(&fs, solid)?,
        "line23" => coloring_23_line(&fs, solid, line(&geo)?, spec.seed)?,
        "plane23" => {
            let setup = match (&spec.plane, &spec.line0) {
                (None, None) if spec.w.is_empty() => default_plane_setup(&geo, solid, spec.seed)?,
                (Some(plane), Some(line0)) => PlaneSetup {
                    solid,
                    plane: subspace_id(&geo, 3, plane)?,
                    line0: subspace_id(&geo, 2, line0)?,
                    w: spec.w.clone(),
                },
                _ => {
                    return Err(CliError::Invalid(
                        "plane23 needs all of --plane, --line0 and --w, or none".into(),
                    ))
                }
            };
            coloring_23_plane(&fs, &setup, spec.seed)?
        }
        "mixed23" => coloring_23_mixed(&fs, solid, line(&geo)?, spec.r, spec.seed)?,
        other => {
            return Err(CliError::Invalid(format!(
                "unknown construction {other:?}; expected covering24, line23, plane23 or mixed23"
            )))
        }
    };
    Ok(coloring.with_colors(fs.len()))
}

fn color(ctx: &Ctx, q: u32, spec: &ColorSpec, expected: Option<usize>, out: Option<&Path>) -> Result<()> {
    let coloring = build_coloring(ctx, q, spec)?;
    emit(&coloring, out)?;
    let k = coloring.num_classes();
    eprintln!("{} over GF({q}): {k} classes", spec.construction);
    match expected {
        Some(e) if e != k => Err(CliError::Verification(format!("expected {e} classes, got {k}"))),
        _ => Ok(()),
    }
}

fn ekr(ctx: &Ctx, q: u32, kind: &str, a: &str, b: &str, out: Option<&Path>) -> Result<()> {
    let kind = EkrKind::from_name(kind).ok_or_else(|| {
        CliError::Invalid(format!(
            "unknown family {kind:?}; expected one of point-line, point-solid, solid-plane, solid-point"
        ))
    })?;
    let fs = ctx.flags(q, &[2, 3])?;
    let geo = fs.geometry().clone();
    let (da, db) = kind.param_dims();
    let family = ekr_by_ids(&fs, kind, subspace_id(&geo, da, a)?, subspace_id(&geo, db, b)?)?;
    eprintln!("{} over GF({q}): {} flags", kind.name(), family.len());
    emit(
        &FamilyDoc {
            graph: GraphId::of(&fs),
            family,
        },
        out,
    )
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }
}

fn verify(ctx: &Ctx, files: &[PathBuf]) -> Result<()> {
    let stdin = [PathBuf::from("-")];
    let files = if files.is_empty() { &stdin[..] } else { files };
    let mut graphs: Vec<(GraphId, KneserGraph)> = Vec::new();
    let mut failed = Vec::new();
    for path in files {
        let name = path.display().to_string();
        let text = read_input(path)?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{name}: not JSON: {e}")))?;
        let id: GraphId = serde_json::from_value(value.get("graph").cloned().unwrap_or(Value::Null))
            .map_err(|e| CliError::Invalid(format!("{name}: no graph record: {e}")))?;
        let pos = match graphs.iter().position(|(g, _)| *g == id) {
            Some(p) => p,
            None => {
                graphs.push((id.clone(), ctx.graph_of(&id)?));
                graphs.len() - 1
            }
        };
        let g = &graphs[pos].1;
        let (kind, ok, report) = if value.get("classes").is_some() {
            let c: Coloring =
                serde_json::from_value(value).map_err(|e| CliError::Verification(format!("{name}: {e}")))?;
            let r = verify_coloring(g, &c)?;
            eprintln!(
                "{name}: coloring of {} vertices, {} classes, cover {}, independent {}{}",
                g.vertex_count(),
                r.num_classes,
                r.cover_ok,
                r.all_independent,
                r.colors_proper
                    .map_or(String::new(), |p| format!(", colors proper {p}"))
            );
            ("coloring", r.ok(), serde_json::to_value(&r))
        } else if value.get("family").is_some() {
            let doc: FamilyDoc =
                serde_json::from_value(value).map_err(|e| CliError::Verification(format!("{name}: {e}")))?;
            let members = &doc.family.members;
            let well_formed =
                members.windows(2).all(|w| w[0] < w[1]) && members.iter().all(|&v| (v as usize) < g.vertex_count());
            if !well_formed {
                eprintln!("{name}: members are not sorted, distinct vertex ids");
                failed.push(name);
                continue;
            }
            let r = verify_family(g, members)?;
            eprintln!(
                "{name}: family {} of {} flags, independent {}, maximal {}",
                doc.family.name, r.size, r.independent, r.maximal
            );
            ("family", r.independent, serde_json::to_value(&r))
        } else {
            return Err(CliError::Invalid(format!(
                "{name}: neither a coloring nor a family document"
            )));
        };
        let report = report.map_err(|e| CliError::Runtime(e.to_string()))?;
        emit(&json!({ "file": name, "kind": kind, "ok": ok, "report": report }), None)?;
        if !ok {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

fn alpha(ctx: &Ctx, args: &GraphArgs, b: &BudgetArgs, require_exact: bool) -> Result<()> {
    let g = ctx.graph(args)?;
    let r = kneser_independence_number(&g, &ctx.budget(b))?;
    emit(&r, None)?;
    eprintln!(
        "alpha in [{}, {}]{} after {} nodes, {:.1}s",
        r.lower,
        r.upper,
        if r.exact { " (exact)" } else { "" },
        r.nodes_expanded,
        r.seconds
    );
    if require_exact && !r.exact {
        return Err(CliError::Budget(format!(
            "alpha not closed: [{}, {}]",
            r.lower, r.upper
        )));
    }
    Ok(())
}

fn chi(ctx: &Ctx, args: &GraphArgs, b: &BudgetArgs, require_exact: bool) -> Result<()> {
    let g = ctx.graph(args)?;
    let r = kneser_chromatic_bounds(&g, &ctx.budget(b))?;
    emit(&r, None)?;
    eprintln!(
        "chi in [{}, {}]{}, alpha <= {}, {:.1}s",
        r.lower,
        r.upper,
        if r.exact { " (exact)" } else { "" },
        r.alpha_upper,
        r.seconds
    );
    if require_exact && !r.exact {
        return Err(CliError::Budget(format!("chi not closed: [{}, {}]", r.lower, r.upper)));
    }
    Ok(())
}

fn falsify(ctx: &Ctx, args: &GraphArgs, restarts: u64, max_seconds: f64, seed: u64) -> Result<()> {
    let g = ctx.graph(args)?;
    let budget = SearchBudget {
        max_nodes: restarts,
        max_seconds,
        threads: ctx.threads,
        seed,
    };
    let r = hm_falsifier(&g, &budget)?;
    emit(&r, None)?;
    eprintln!(
        "best admissible maximal EKR set: {} (e1 = {}) over {} restarts, {:.1}s",
        r.best_size, r.e1, r.restarts, r.seconds
    );
    if r.exceeded_e1 {
        return Err(CliError::Verification(format!(
            "size {} exceeds e1 = {}",
            r.best_size, r.e1
        )));
    }
    Ok(())
}

fn identity(q_max: u64) -> Result<()> {
    if q_max < 2 {
        return Err(CliError::Invalid("--q-max must be at least 2".into()));
    }
    let rows: Vec<Value> = (2..=q_max)
        .map(|q| {
            let c = line_plane_identity(q);
            json!({ "q": q, "lhs": c.lhs, "rhs": c.rhs, "equal": c.equal })
        })
        .collect();
    let bad: Vec<u64> = (2..=q_max).filter(|&q| !line_plane_identity(q).equal).collect();
    emit(&rows, None)?;
    if bad.is_empty() {
        eprintln!("identity holds for q = 2..={q_max}");
        Ok(())
    } else {
        Err(CliError::Verification(format!("identity fails for q in {bad:?}")))
    }
}

#[allow(clippy::too_many_arguments)]
fn heavy_solid(
    ctx: &Ctx,
    q: u32,
    points: Vec<u32>,
    random: Option<usize>,
    seed: u64,
    p: &[u32],
    m: f64,
    n: f64,
) -> Result<()> {
    if p.len() != 3 {
        return Err(CliError::Invalid(format!("--p takes three points, got {}", p.len())));
    }
    let geo = ctx.geometry(q, 5)?;
    let npoints = geo.catalog(1)?.len() as u32;
    if let Some(&bad) = p.iter().find(|&&x| x >= npoints) {
        return Err(CliError::Invalid(format!("no point with index {bad}")));
    }
    let points = match random {
        Some(_) if !points.is_empty() => return Err(CliError::Invalid("--points and --random are exclusive".into())),
        Some(k) => {
            let f = geo.field();
            let mut span = geo.space((1, p[0]))?.clone();
            for &x in &p[1..] {
                span = span.sum(f, geo.space((1, x))?)?;
            }
            let mut off: Vec<u32> = (0..npoints)
                .filter(|&x| !geo.space((1, x)).is_ok_and(|pt| pt.is_subspace_of(f, &span)))
                .collect();
            off.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            off.truncate(k);
            off.sort_unstable();
            off
        }
        None => points,
    };
    let inst = HeavySolidInstance {
        points,
        p: [p[0], p[1], p[2]],
        m,
        n,
    };
    let check = heavy_solid_check(&geo, &inst)?;
    eprintln!(
        "|M| = {}, d = {:.4}, observed n = {:.4} (<= {n}: {}), q threshold {}, heaviest solid {} with {} points",
        inst.points.len(),
        check.d,
        check.n_observed,
        check.n_ok,
        check.q_threshold,
        check.heaviest.solid,
        check.heaviest.count
    );
    emit(&json!({ "instance": inst, "check": check }), None)
}
