//! Command implementations. Each builds a [`Report`] and hands it to
//! [`output::emit`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use coxric::checks::{self, CheckContext, Status};
use coxric::dihedral;
use coxric::gamma::{self, CurvatureOptions};
use coxric::group::IDENTITY;
use coxric::iso::{self, IsoMode, SubsetDescriptor};
use coxric::linalg;
use coxric::spectral;

use crate::input;
use crate::output::{self, fmt, Failure, Format, Report, RunConfig};
use crate::Common;

/// Ricci curvature of a Bruhat graph is exactly 2.
const BRUHAT_RICCI: f64 = 2.0;
const RICCI_TOL: f64 = 1e-8;
/// Spectra longer than this are summarized unless `--full-spectrum` is set.
const SPECTRUM_LISTING_LIMIT: usize = 200;
const PER_VERTEX_TABLE_LIMIT: usize = 30;

type CmdResult = Result<ExitCode, Failure>;

fn emit(cfg: &RunConfig, report: Report, common: &Common) -> CmdResult {
    output::emit(cfg, report, common.out.as_ref())
}

pub fn group(spec: &str, common: &Common) -> CmdResult {
    let (matrix, grp) = input::load_group(spec)?;
    let cfg = RunConfig::new("group", spec, common.format(), common.force);
    let hist = grp.length_histogram();
    let t = grp.reflections().len();
    let json = json!({
        "spec": spec,
        "rank": grp.rank(),
        "matrix": matrix.raw_rows(),
        "order": grp.order(),
        "reflections": t,
        "positive_roots": grp.root_system().num_positive(),
        "longest_length": hist.len() - 1,
        "length_histogram": hist,
    });
    let mut table = String::new();
    writeln!(table, "type        {spec}").unwrap();
    writeln!(table, "rank        {}", grp.rank()).unwrap();
    writeln!(table, "order       {}", grp.order()).unwrap();
    writeln!(table, "reflections {t}").unwrap();
    writeln!(table, "length      count").unwrap();
    let mut csv = String::from("length,count\n");
    for (l, c) in hist.iter().enumerate() {
        writeln!(table, "{l:<11} {c}").unwrap();
        writeln!(csv, "{l},{c}").unwrap();
    }
    let mut report = Report::new(json, table, None).with_csv(csv);
    if common.format() == Format::Dot {
        input::guard(grp.order(), common.force)?;
        report = report.with_dot(grp.bruhat_dot(spec));
    }
    emit(&cfg, report, common)
}

#[derive(Args)]
pub struct RicciArgs {
    /// Type spec or matrix JSON file.
    spec: Option<String>,
    /// Edge-list or JSON graph file instead of a Coxeter type.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Only this vertex: `e`, a word such as `s1s2`, or a vertex id.
    #[arg(long, conflicts_with = "all")]
    vertex: Option<String>,
    /// Every vertex, even on groups past the size guard.
    #[arg(long)]
    all: bool,
    /// Include the minimizing function for each evaluated vertex.
    #[arg(long)]
    emit_minimizer: bool,
    #[arg(long, default_value = "jacobi")]
    solver: String,
    /// Eigensolver convergence tolerance.
    #[arg(long, default_value_t = linalg::DEFAULT_TOL)]
    tol: f64,
    /// Seed for the spot-check vertices on large groups.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

pub fn ricci(args: &RicciArgs) -> CmdResult {
    let common = &args.common;
    let subject = input::load_subject(args.spec.as_deref(), args.graph.as_deref(), common.force)?;
    let solver = linalg::eigen_solver(&args.solver)?;
    let mut cfg = RunConfig::new("ricci", subject.name(), common.format(), common.force);
    cfg.solver = Some(solver.name().to_string());
    cfg.tol = Some(args.tol);
    let g = subject.graph();
    let n = g.num_vertices();
    let transitive = subject.group().is_some();

    let (vertices, method) = if let Some(v) = &args.vertex {
        let v = subject.parse_vertex(v)?;
        (vec![v], if transitive { "transitive" } else { "vertex" })
    } else if args.all || !transitive || n <= input::GROUP_SIZE_GUARD {
        ((0..n).collect(), "all")
    } else {
        cfg.seed = Some(args.seed);
        let grp = subject.group().expect("transitive implies a group");
        let ctx = CheckContext::new(grp, g, args.seed);
        (
            ctx.vertices(0, checks::SPOT_CHECK_VERTICES, 0),
            "transitive",
        )
    };
    let opts = CurvatureOptions {
        solver: solver.as_ref(),
        tol: args.tol,
        with_minimizer: false,
    };
    let global = gamma::ricci_over(g, &vertices, &opts)?;
    let spread = global.spread();

    let minimizers: BTreeMap<usize, Value> = if args.emit_minimizer {
        let opts = CurvatureOptions {
            with_minimizer: true,
            ..opts
        };
        vertices
            .iter()
            .map(|&x| {
                let r = gamma::local_ricci_with(g, x, &opts)?;
                Ok((
                    x,
                    serde_json::to_value(r.minimizer).map_err(coxric::Error::from)?,
                ))
            })
            .collect::<Result<_, Failure>>()?
    } else {
        BTreeMap::new()
    };

    let pass = transitive
        .then(|| (global.ric - BRUHAT_RICCI).abs() <= RICCI_TOL && spread <= checks::UNIFORM_TOL);
    let per_vertex: Vec<Value> = global
        .per_vertex
        .iter()
        .map(|&(v, ric)| {
            let mut entry = json!({"vertex": v, "label": subject.label(v), "ric": ric});
            if let Some(m) = minimizers.get(&v) {
                entry["minimizer"] = m.clone();
            }
            entry
        })
        .collect();
    let mut json = json!({
        "vertices": n,
        "method": method,
        "evaluated": vertices.len(),
        "ric": global.ric,
        "argmin": global.argmin,
        "spread": spread,
        "per_vertex": per_vertex,
    });
    if transitive {
        json["expected"] = json!(BRUHAT_RICCI);
    }

    let mut table = String::new();
    writeln!(table, "input     {}", subject.name()).unwrap();
    writeln!(
        table,
        "vertices  {n} ({} evaluated, {method})",
        vertices.len()
    )
    .unwrap();
    writeln!(table, "Ric       {}", fmt(global.ric)).unwrap();
    writeln!(table, "spread    {}", fmt(spread)).unwrap();
    if vertices.len() <= PER_VERTEX_TABLE_LIMIT || args.all {
        writeln!(table, "vertex    label     ric").unwrap();
        for &(v, ric) in &global.per_vertex {
            writeln!(table, "{v:<9} {:<9} {}", subject.label(v), fmt(ric)).unwrap();
        }
    }
    let mut csv = String::from("vertex,label,ric\n");
    for &(v, ric) in &global.per_vertex {
        writeln!(csv, "{v},{},{}", subject.label(v), fmt(ric)).unwrap();
    }
    emit(&cfg, Report::new(json, table, pass).with_csv(csv), common)
}

#[derive(Args)]
pub struct SpectralArgs {
    spec: Option<String>,
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Eigensolver; defaults to Jacobi up to order 400 and tridiagonal QL above.
    #[arg(long)]
    solver: Option<String>,
    /// List every eigenvalue even for large graphs.
    #[arg(long)]
    full_spectrum: bool,
    #[command(flatten)]
    common: Common,
}

fn spectral_guard(n: usize, force: bool) -> Result<(), Failure> {
    if n > spectral::FORCED_VERTEX_LIMIT {
        return Err(Failure::usage(format!(
            "{n} vertices exceed the hard spectral limit of {}",
            spectral::FORCED_VERTEX_LIMIT
        )));
    }
    if n > spectral::DEFAULT_VERTEX_LIMIT && !force {
        return Err(Failure::usage(format!(
            "{n} vertices exceed the spectral limit of {}; pass --force",
            spectral::DEFAULT_VERTEX_LIMIT
        )));
    }
    Ok(())
}

pub fn spectral(args: &SpectralArgs) -> CmdResult {
    let common = &args.common;
    let subject = input::load_subject(args.spec.as_deref(), args.graph.as_deref(), common.force)?;
    let g = subject.graph();
    let n = g.num_vertices();
    spectral_guard(n, common.force)?;
    let solver = match &args.solver {
        Some(name) => linalg::eigen_solver(name)?,
        None => spectral::default_solver(n),
    };
    let mut cfg = RunConfig::new("spectral", subject.name(), common.format(), common.force);
    cfg.solver = Some(solver.name().to_string());
    let r = spectral::spectral_gap_with(g, solver.as_ref())?;
    let verdict = subject
        .group()
        .map(|_| spectral::check_gap_vs_ricci(&r, BRUHAT_RICCI));
    let pass = verdict.as_ref().map(|v| v.pass && r.zero_multiplicity == 1);

    let mut json = json!({
        "vertices": n,
        "gap": r.spectral_gap,
        "zero_multiplicity": r.zero_multiplicity,
        "components": r.components,
        "lambda_max": r.max_eigenvalue(),
        "solver": r.solver,
        "warnings": r.warnings,
    });
    if n <= SPECTRUM_LISTING_LIMIT || args.full_spectrum {
        json["eigenvalues"] = json!(r.eigenvalues);
    } else {
        json["spectrum"] = json!({
            "min": r.eigenvalues.first(),
            "gap": r.spectral_gap,
            "max": r.max_eigenvalue(),
        });
    }
    if let Some(v) = &verdict {
        json["bound"] = json!({"ric": v.ric, "pass": v.pass});
    }

    let mut table = String::new();
    writeln!(table, "input      {}", subject.name()).unwrap();
    writeln!(table, "vertices   {n}").unwrap();
    match r.spectral_gap {
        Some(l) => writeln!(table, "gap        {}", fmt(l)).unwrap(),
        None => writeln!(table, "gap        none").unwrap(),
    }
    writeln!(table, "lambda_max {}", fmt(r.max_eigenvalue())).unwrap();
    writeln!(table, "zeros      {}", r.zero_multiplicity).unwrap();
    if let Some(v) = &verdict {
        writeln!(
            table,
            "gap >= {}  {}",
            v.ric,
            if v.pass { "PASS" } else { "FAIL" }
        )
        .unwrap();
    }
    for w in &r.warnings {
        writeln!(table, "warning: {w}").unwrap();
    }
    let mut csv = String::from("index,eigenvalue\n");
    for (i, l) in r.eigenvalues.iter().enumerate() {
        writeln!(csv, "{i},{}", fmt(*l)).unwrap();
    }
    emit(&cfg, Report::new(json, table, pass).with_csv(csv), common)
}

#[derive(Args)]
pub struct IsoArgs {
    spec: Option<String>,
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Uniform random subsets; a stratified pass over sizes follows.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Every subset (at most 20 vertices).
    #[arg(long)]
    exhaustive: bool,
    /// Spectral gap to use instead of measuring it.
    #[arg(long)]
    lambda: Option<f64>,
    /// Curvature to use instead of computing it.
    #[arg(long)]
    k: Option<f64>,
    /// Include every subset report in JSON output.
    #[arg(long)]
    emit_subsets: bool,
    #[command(flatten)]
    common: Common,
}

fn descriptor(d: &SubsetDescriptor) -> (String, String) {
    match d {
        SubsetDescriptor::Explicit { members } => ("explicit".into(), format!("{members:?}")),
        SubsetDescriptor::Mask { mask } => ("mask".into(), mask.to_string()),
        SubsetDescriptor::Uniform { index, .. } => ("uniform".into(), index.to_string()),
        SubsetDescriptor::Stratified { size, .. } => ("stratified".into(), size.to_string()),
    }
}

pub fn iso(args: &IsoArgs) -> CmdResult {
    let common = &args.common;
    let subject = input::load_subject(args.spec.as_deref(), args.graph.as_deref(), common.force)?;
    let g = subject.graph();
    let n = g.num_vertices();
    let lambda = match args.lambda {
        Some(l) => l,
        None => {
            spectral_guard(n, common.force)?;
            spectral::spectral_gap(g)?
                .spectral_gap
                .ok_or_else(|| Failure::usage("graph has no nonzero eigenvalue"))?
        }
    };
    let k = match (args.k, subject.group()) {
        (Some(k), _) => k,
        (None, Some(_)) if n > input::GROUP_SIZE_GUARD => {
            gamma::global_ricci_transitive(g, IDENTITY)?.ric
        }
        (None, _) => gamma::global_ricci(g)?.ric,
    };
    let mode = if args.exhaustive {
        IsoMode::Exhaustive
    } else {
        IsoMode::Sampled {
            seed: args.seed,
            samples: args.samples,
        }
    };
    let mut cfg = RunConfig::new("iso", subject.name(), common.format(), common.force);
    if !args.exhaustive {
        cfg.seed = Some(args.seed);
        cfg.samples = Some(args.samples);
    }
    let v = iso::verify_isoperimetry(g, mode, lambda, k)?;

    let mut by_size: BTreeMap<usize, (usize, f64, usize)> = BTreeMap::new();
    for r in &v.reports {
        let e = by_size
            .entry(r.size)
            .or_insert((0, f64::INFINITY, usize::MAX));
        e.0 += 1;
        e.1 = e.1.min(r.slack);
        e.2 = e.2.min(r.boundary);
    }
    let sizes: Vec<Value> = by_size
        .iter()
        .map(|(s, (count, slack, boundary))| json!({"size": s, "count": count, "min_slack": slack, "min_boundary": boundary}))
        .collect();
    let failing: Vec<_> = v.reports.iter().filter(|r| !r.pass).collect();
    let mut json = json!({
        "vertices": n,
        "lambda": lambda,
        "k": k,
        "mode": if args.exhaustive { "exhaustive" } else { "sampled" },
        "checked": v.checked,
        "failures": v.failures,
        "min_slack": v.min_slack,
        "by_size": sizes,
        "failing": failing,
    });
    if args.emit_subsets {
        json["reports"] = serde_json::to_value(&v.reports).map_err(coxric::Error::from)?;
    }

    let mut table = String::new();
    writeln!(table, "input      {}", subject.name()).unwrap();
    writeln!(table, "lambda     {}", fmt(lambda)).unwrap();
    writeln!(table, "K          {}", fmt(k)).unwrap();
    writeln!(
        table,
        "subsets    {} ({})",
        v.checked,
        if args.exhaustive {
            "exhaustive"
        } else {
            "sampled"
        }
    )
    .unwrap();
    writeln!(table, "failures   {}", v.failures).unwrap();
    writeln!(table, "min slack  {}", fmt(v.min_slack)).unwrap();
    writeln!(table, "size  count  min_boundary  min_slack").unwrap();
    for (s, (count, slack, boundary)) in &by_size {
        writeln!(table, "{s:<5} {count:<6} {boundary:<13} {}", fmt(*slack)).unwrap();
    }
    let mut csv = String::from("kind,key,size,boundary,bound,corollary_bound,slack,pass\n");
    for r in &v.reports {
        let (kind, key) = descriptor(&r.subset);
        writeln!(
            csv,
            "{kind},\"{key}\",{},{},{},{},{},{}",
            r.size,
            r.boundary,
            fmt(r.bound),
            fmt(r.corollary_bound),
            fmt(r.slack),
            r.pass
        )
        .unwrap();
    }
    emit(
        &cfg,
        Report::new(json, table, Some(v.all_pass())).with_csv(csv),
        common,
    )
}

pub fn classes(spec: &str, common: &Common) -> CmdResult {
    let (_, grp) = input::load_group(spec)?;
    input::guard(grp.order(), common.force)?;
    let cfg = RunConfig::new("classes", spec, common.format(), common.force);
    let r = dihedral::verify_structure(&grp)?;
    let classes: Vec<Value> = r
        .classes
        .iter()
        .map(|c| {
            json!({
                "representative": c.representative,
                "label": grp.label(c.representative),
                "size": c.members.len(),
                "members": c.members.iter().map(|&u| json!({"id": u, "label": grp.label(u)})).collect::<Vec<_>>(),
                "subgroup_order": c.subgroup_order,
                "reflections": c.reflections.iter().map(|&t| grp.label(t)).collect::<Vec<_>>(),
                "dihedral_m": c.dihedral_m,
                "all_rotations": c.all_rotations,
                "involution_in_larger_dihedral": c.involution_in_larger_dihedral,
            })
        })
        .collect();
    let json = json!({
        "order": r.group_order,
        "reflections": r.reflections,
        "sphere2": r.sphere2_size,
        "classes": classes,
        "checks": r.checks,
        "notes": r.notes,
    });

    let mut table = String::new();
    writeln!(
        table,
        "type {spec}: order {}, |T| = {}, |B(2,e)| = {}",
        r.group_order, r.reflections, r.sphere2_size
    )
    .unwrap();
    writeln!(table, "representative  size  order  |T_U|  m   flags").unwrap();
    let mut csv = String::from("representative,label,size,subgroup_order,reflections,m,all_rotations,involution_in_larger_dihedral\n");
    for c in &r.classes {
        let m = c.dihedral_m.map_or("-".to_string(), |m| m.to_string());
        let mut flags = Vec::new();
        if c.all_rotations {
            flags.push("all-rotations");
        }
        if c.involution_in_larger_dihedral {
            flags.push("involution-in-larger-dihedral");
        }
        let label = grp.label(c.representative);
        writeln!(
            table,
            "{label:<15} {:<5} {:<6} {:<6} {m:<3} {}",
            c.members.len(),
            c.subgroup_order,
            c.reflections.len(),
            flags.join(",")
        )
        .unwrap();
        writeln!(
            csv,
            "{},{label},{},{},{},{m},{},{}",
            c.representative,
            c.members.len(),
            c.subgroup_order,
            c.reflections.len(),
            c.all_rotations,
            c.involution_in_larger_dihedral
        )
        .unwrap();
    }
    for c in &r.checks {
        writeln!(
            table,
            "{} {} ({})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        )
        .unwrap();
    }
    for note in &r.notes {
        writeln!(table, "note: {note}").unwrap();
    }
    emit(
        &cfg,
        Report::new(json, table, Some(r.all_pass())).with_csv(csv),
        common,
    )
}

#[derive(Args)]
pub struct CheckArgs {
    /// Type spec; omit with `--list`.
    spec: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random subsets for sampled isoperimetry and sampled quadruples.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Random functions for the proof-step estimates.
    #[arg(long, default_value_t = 1000)]
    functions: usize,
    /// Comma-separated subset of checks.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// List the available checks and exit.
    #[arg(long)]
    list: bool,
    #[command(flatten)]
    common: Common,
}

pub fn check(args: &CheckArgs) -> CmdResult {
    let common = &args.common;
    let selected = checks::select_checks(&args.only)?;
    if args.list {
        let mut text = String::new();
        for c in &selected {
            writeln!(text, "{:<24} {}", c.name(), c.description()).unwrap();
        }
        output::write_text(&text, common.out.as_ref())?;
        return Ok(ExitCode::SUCCESS);
    }
    let spec = args
        .spec
        .as_deref()
        .ok_or_else(|| Failure::usage("missing type spec"))?;
    let (_, grp) = input::load_group(spec)?;
    input::guard(grp.order(), common.force)?;
    let graph = grp.bruhat_graph();
    let mut ctx = CheckContext::new(&grp, &graph, args.seed);
    ctx.samples = args.samples;
    ctx.functions = args.functions;
    let suite = checks::run_checks(&ctx, &selected);

    let mut cfg = RunConfig::new("check", spec, common.format(), common.force);
    cfg.seed = Some(args.seed);
    cfg.samples = Some(args.samples);
    let json = json!({
        "order": suite.order,
        "functions": args.functions,
        "checks": suite.outcomes,
    });
    let mut table = String::new();
    let mut csv = String::from("name,status,summary\n");
    for o in &suite.outcomes {
        let status = match o.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        writeln!(table, "{status} {:<24} {}", o.name, o.summary).unwrap();
        writeln!(
            csv,
            "{},{status},\"{}\"",
            o.name,
            o.summary.replace('"', "'")
        )
        .unwrap();
    }
    emit(
        &cfg,
        Report::new(json, table, Some(suite.pass())).with_csv(csv),
        common,
    )
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Artifact {
    Matrix,
    Roots,
    Group,
    Bruhat,
    Cayley,
}

#[derive(Args)]
pub struct ExportArgs {
    spec: String,
    #[arg(long, value_enum, default_value_t = Artifact::Group)]
    what: Artifact,
    #[command(flatten)]
    common: Common,
}

/// Exports are raw artifacts that the loaders read back, without a report
/// header.
pub fn export(args: &ExportArgs) -> CmdResult {
    let common = &args.common;
    let (matrix, grp) = input::load_group(&args.spec)?;
    let format = common.format();
    let unsupported = || Failure::usage(format!("{:?} export has no {format:?} form", args.what));
    let graph = match args.what {
        Artifact::Bruhat => Some(grp.bruhat_graph()),
        Artifact::Cayley => Some(grp.cayley_graph()),
        _ => None,
    };
    let text = match (args.what, format) {
        (Artifact::Matrix, Format::Json) => matrix.to_json() + "\n",
        (Artifact::Matrix, Format::Table) => matrix.to_string(),
        (Artifact::Roots, Format::Json) => grp.root_system().to_json() + "\n",
        (Artifact::Roots, Format::Table | Format::Csv) => {
            let mut s = String::new();
            for r in grp.root_system().roots() {
                let coords: Vec<String> = r.coords.iter().map(|c| fmt(*c)).collect();
                writeln!(s, "{},{}", coords.join(","), r.positive).unwrap();
            }
            s
        }
        (Artifact::Group, Format::Json) => grp.to_json() + "\n",
        (Artifact::Group | Artifact::Bruhat, Format::Dot) => grp.bruhat_dot(&args.spec),
        (Artifact::Cayley, Format::Dot) => {
            let labels = (0..grp.order()).map(|w| grp.label(w)).collect();
            let g = graph.expect("graph artifact").with_labels(labels);
            g.to_dot(&args.spec, Some(grp.lengths()))
        }
        (Artifact::Bruhat | Artifact::Cayley, Format::Json) => {
            graph.expect("graph artifact").to_json() + "\n"
        }
        (Artifact::Bruhat | Artifact::Cayley, Format::Table) => {
            graph.expect("graph artifact").to_edge_list()
        }
        (Artifact::Bruhat | Artifact::Cayley, Format::Csv) => {
            let mut s = String::from("u,v\n");
            for (u, v) in graph.expect("graph artifact").edges() {
                writeln!(s, "{u},{v}").unwrap();
            }
            s
        }
        _ => return Err(unsupported()),
    };
    output::write_text(&text, common.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}
