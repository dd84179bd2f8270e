//! The invariant suite behind `coxric check`: every check is a named
//! strategy run against one group and its Bruhat graph.

use std::collections::HashSet;
use std::sync::OnceLock;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dihedral::{self, SphereClass};
use crate::error::{Error, Result};
use crate::estimates;
use crate::gamma::{self, GlobalCurvature};
use crate::graph::Graph;
use crate::group::{Group, IDENTITY};
use crate::iso::{self, IsoMode};
use crate::spectral::{self, SpectralReport};

pub const RICCI_TOL: f64 = 1e-8;
pub const UNIFORM_TOL: f64 = 1e-9;
pub const ORACLE_TOL: f64 = 1e-10;
/// Groups up to this order get curvature at every vertex; larger ones a
/// seeded spot-check.
pub const FULL_CURVATURE_LIMIT: usize = 1200;
pub const SPOT_CHECK_VERTICES: usize = 20;
pub const LOCALITY_FULL_LIMIT: usize = 200;
pub const ORACLE_VERTICES: usize = 5;
pub const ORACLE_FUNCTIONS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: Status,
    pub summary: String,
    pub data: Value,
}

impl CheckOutcome {
    fn verdict(name: &'static str, pass: bool, summary: String, data: Value) -> Self {
        let status = if pass { Status::Pass } else { Status::Fail };
        Self {
            name,
            status,
            summary,
            data,
        }
    }

    fn skipped(name: &'static str, summary: String) -> Self {
        Self {
            name,
            status: Status::Skipped,
            summary,
            data: Value::Null,
        }
    }
}

/// Shared inputs, with expensive intermediate results computed once.
pub struct CheckContext<'a> {
    pub grp: &'a Group,
    pub graph: &'a Graph,
    pub seed: u64,
    /// Random subsets for sampled isoperimetry and sampled quadruples.
    pub samples: usize,
    /// Random functions for the proof-step estimates.
    pub functions: usize,
    curvature: OnceLock<Result<GlobalCurvature>>,
    classes: OnceLock<Result<Vec<SphereClass>>>,
    spectrum: OnceLock<Option<Result<SpectralReport>>>,
}

impl<'a> CheckContext<'a> {
    pub fn new(grp: &'a Group, graph: &'a Graph, seed: u64) -> Self {
        Self {
            grp,
            graph,
            seed,
            samples: 10_000,
            functions: 1000,
            curvature: OnceLock::new(),
            classes: OnceLock::new(),
            spectrum: OnceLock::new(),
        }
    }

    /// Identity plus a seeded sample, or every vertex when `n <= full`.
    pub fn vertices(&self, full: usize, k: usize, salt: u64) -> Vec<usize> {
        let n = self.graph.num_vertices();
        if n <= full {
            return (0..n).collect();
        }
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(self.seed ^ salt);
        let mut vs: Vec<usize> = index::sample(&mut rng, n - 1, k.min(n - 1))
            .into_iter()
            .map(|v| v + 1)
            .collect();
        vs.push(IDENTITY);
        vs.sort_unstable();
        vs
    }

    fn curvature(&self) -> Result<&GlobalCurvature> {
        self.curvature
            .get_or_init(|| {
                let vs = self.vertices(FULL_CURVATURE_LIMIT, SPOT_CHECK_VERTICES, 0x52_49_43);
                gamma::ricci_over(self.graph, &vs, &Default::default())
            })
            .as_ref()
            .map_err(clone_err)
    }

    fn classes(&self) -> Result<&[SphereClass]> {
        self.classes
            .get_or_init(|| dihedral::classes(self.grp))
            .as_ref()
            .map(Vec::as_slice)
            .map_err(clone_err)
    }

    /// `None` above the default spectral size limit; the dense solve is
    /// cubic in the order.
    fn spectrum(&self) -> Option<Result<&SpectralReport>> {
        self.spectrum
            .get_or_init(|| {
                let n = self.graph.num_vertices();
                (n <= spectral::DEFAULT_VERTEX_LIMIT).then(|| spectral::spectral_gap(self.graph))
            })
            .as_ref()
            .map(|r| r.as_ref().map_err(clone_err))
    }
}

fn clone_err(e: &Error) -> Error {
    Error::Internal(e.to_string())
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome>;
}

macro_rules! check {
    ($ty:ident, $name:literal, $desc:literal, |$ctx:ident, $nm:ident| $body:block) => {
        struct $ty;
        impl Check for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn description(&self) -> &'static str {
                $desc
            }
            fn run(&self, $ctx: &CheckContext) -> Result<CheckOutcome> {
                let $nm = $name;
                $body
            }
        }
    };
}

check!(
    RootCounts,
    "root-counts",
    "|Φ| = 2|Φ⁺| = 2|T| and the longest element has length |Φ⁺|",
    |ctx, name| {
        let rs = ctx.grp.root_system();
        let t = ctx.grp.reflections().len();
        let max_len = ctx.grp.lengths().iter().copied().max().unwrap_or(0);
        let longest = ctx.grp.lengths().iter().filter(|&&l| l == max_len).count();
        let pass = rs.len() == 2 * rs.num_positive()
            && rs.num_positive() == t
            && max_len == t
            && longest == 1;
        Ok(CheckOutcome::verdict(
            name,
            pass,
            format!(
                "|Φ| = {}, |Φ⁺| = {}, |T| = {t}, ℓ(w₀) = {max_len}",
                rs.len(),
                rs.num_positive()
            ),
            json!({"roots": rs.len(), "positive_roots": rs.num_positive(), "reflections": t, "longest_length": max_len, "longest_elements": longest}),
        ))
    }
);

check!(
    Reflections,
    "reflections",
    "reflections are odd-length involutions and exhaust the conjugates of S",
    |ctx, name| {
        let g = ctx.grp;
        let bad = g
            .reflections()
            .iter()
            .copied()
            .find(|&t| g.mult(t, t) != IDENTITY || g.length(t).is_multiple_of(2));
        let mut conj = HashSet::new();
        for w in 0..g.order() {
            let wi = g.inverse(w);
            for &s in g.simple() {
                conj.insert(g.mult(g.mult(w, s), wi));
            }
        }
        let same =
            conj.len() == g.reflections().len() && g.reflections().iter().all(|t| conj.contains(t));
        Ok(CheckOutcome::verdict(
            name,
            bad.is_none() && same,
            match bad {
                Some(t) => format!("element {t} ({}) is not an odd involution", g.label(t)),
                None => format!(
                    "{} reflections, {} conjugates of S",
                    g.reflections().len(),
                    conj.len()
                ),
            },
            json!({"reflections": g.reflections().len(), "conjugates": conj.len()}),
        ))
    }
);

check!(
    BruhatRegular,
    "bruhat-regular",
    "B(W) is connected, |T|-regular and bipartite by length parity",
    |ctx, name| {
        let (g, grp) = (ctx.graph, ctx.grp);
        let t = grp.reflections().len();
        let irregular = (0..g.num_vertices()).find(|&v| g.degree(v) != t);
        let odd_edge = g
            .edges()
            .into_iter()
            .find(|&(u, v)| grp.length(u) % 2 == grp.length(v) % 2);
        let connected = g.is_connected();
        let pass = irregular.is_none() && odd_edge.is_none() && connected;
        let summary = if let Some(v) = irregular {
            format!("vertex {v} has degree {} instead of {t}", g.degree(v))
        } else if let Some((u, v)) = odd_edge {
            format!("edge {u}-{v} joins equal length parities")
        } else if !connected {
            "graph is disconnected".to_string()
        } else {
            format!(
                "{} vertices, {} edges, degree {t}",
                g.num_vertices(),
                g.num_edges()
            )
        };
        Ok(CheckOutcome::verdict(
            name,
            pass,
            summary,
            json!({"vertices": g.num_vertices(), "edges": g.num_edges(), "degree": t, "connected": connected}),
        ))
    }
);

check!(
    TriangleFree,
    "triangle-free",
    "no edge of B(W) lies in a triangle",
    |ctx, name| {
        let stats = ctx.graph.triangle_stats();
        Ok(CheckOutcome::verdict(
            name,
            stats.max == 0,
            format!("T_max = {}", stats.max),
            json!({"t_max": stats.max}),
        ))
    }
);

check!(
    TranslationInvariance,
    "translation-invariance",
    "left translations map edges to edges",
    |ctx, name| {
        let (g, grp) = (ctx.graph, ctx.grp);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(ctx.seed ^ 0x7472);
        let mut translators: Vec<usize> = grp.simple().to_vec();
        translators.extend((0..5).map(|_| rng.gen_range(0..grp.order())));
        let edges = g.edges();
        let mut failure = None;
        'outer: for &h in &translators {
            for &(u, v) in &edges {
                if !g.has_edge(grp.mult(h, u), grp.mult(h, v)) {
                    failure = Some((h, u, v));
                    break 'outer;
                }
            }
        }
        Ok(CheckOutcome::verdict(
            name,
            failure.is_none(),
            match failure {
                Some((h, u, v)) => format!("translation by {h} breaks edge {u}-{v}"),
                None => format!("{} translations × {} edges", translators.len(), edges.len()),
            },
            json!({"translations": translators}),
        ))
    }
);

check!(
    RicciEqualsTwo,
    "ricci-equals-two",
    "Ric(B(W)) = 2",
    |ctx, name| {
        let c = ctx.curvature()?;
        let all = c.per_vertex.len() == ctx.graph.num_vertices();
        Ok(CheckOutcome::verdict(
            name,
            (c.ric - 2.0).abs() <= RICCI_TOL,
            format!(
                "Ric = {:.12} over {} vertices{}",
                c.ric,
                c.per_vertex.len(),
                if all { "" } else { " (transitive spot-check)" }
            ),
            json!({"ric": c.ric, "argmin": c.argmin, "vertices": c.per_vertex.len(), "all_vertices": all}),
        ))
    }
);

check!(
    RicciUniform,
    "ricci-uniform",
    "local curvature agrees at every vertex",
    |ctx, name| {
        let c = ctx.curvature()?;
        let spread = c.spread();
        Ok(CheckOutcome::verdict(
            name,
            spread <= UNIFORM_TOL,
            format!("spread {spread:.3e} over {} vertices", c.per_vertex.len()),
            json!({"spread": spread, "vertices": c.per_vertex.len()}),
        ))
    }
);

check!(
    RicciUpperBound,
    "ricci-upper-bound",
    "Ric <= 2 + T_max/2",
    |ctx, name| {
        let c = ctx.curvature()?;
        let t = ctx.graph.triangle_stats().max as f64;
        let bound = 2.0 + t / 2.0;
        Ok(CheckOutcome::verdict(
            name,
            c.ric <= bound + UNIFORM_TOL,
            format!("Ric = {:.12} <= {bound}", c.ric),
            json!({"ric": c.ric, "bound": bound}),
        ))
    }
);

check!(
    TwoBallLocality,
    "two-ball-locality",
    "local curvature depends only on the two-ball subgraph",
    |ctx, name| {
        let vs = ctx.vertices(LOCALITY_FULL_LIMIT, SPOT_CHECK_VERTICES, 0x6c6f63);
        let mut worst: f64 = 0.0;
        for &x in &vs {
            let full = gamma::local_ricci(ctx.graph, x)?.ric;
            let (sub, _) = ctx.graph.two_ball_subgraph(x);
            let local = gamma::local_ricci(&sub, 0)?.ric;
            worst = worst.max((full - local).abs());
        }
        Ok(CheckOutcome::verdict(
            name,
            worst <= UNIFORM_TOL,
            format!("max deviation {worst:.3e} over {} vertices", vs.len()),
            json!({"max_deviation": worst, "vertices": vs.len()}),
        ))
    }
);

check!(
    Gamma2Oracle,
    "gamma2-oracle",
    "closed-form Γ₂ matches the definition on random functions",
    |ctx, name| {
        let vs = ctx.vertices(0, ORACLE_VERTICES - 1, 0x6f7263);
        let n = ctx.graph.num_vertices();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(ctx.seed ^ 0x6f7263);
        let mut worst: f64 = 0.0;
        let mut f = vec![0.0; n];
        for &x in &vs {
            for _ in 0..ORACLE_FUNCTIONS {
                f.iter_mut().for_each(|v| *v = rng.gen_range(-1.0..=1.0));
                worst = worst.max(gamma::gamma2_oracle_error(ctx.graph, &f, x)?);
            }
        }
        Ok(CheckOutcome::verdict(
            name,
            worst <= ORACLE_TOL,
            format!(
                "max relative error {worst:.3e} over {} functions",
                vs.len() * ORACLE_FUNCTIONS
            ),
            json!({"max_relative_error": worst, "vertices": vs, "functions_per_vertex": ORACLE_FUNCTIONS}),
        ))
    }
);

check!(
    SpectralGap,
    "spectral-gap",
    "spectral gap λ >= 2",
    |ctx, name| {
        let Some(report) = ctx.spectrum() else {
            return Ok(CheckOutcome::skipped(
                name,
                format!(
                    "{} vertices exceed the spectral size guard",
                    ctx.graph.num_vertices()
                ),
            ));
        };
        let report = report?;
        let v = spectral::check_gap_vs_ricci(report, 2.0);
        Ok(CheckOutcome::verdict(
            name,
            v.pass && report.zero_multiplicity == 1,
            format!(
                "λ = {:.12}, zero multiplicity {}",
                report.spectral_gap.unwrap_or(0.0),
                report.zero_multiplicity
            ),
            json!({"gap": report.spectral_gap, "zero_multiplicity": report.zero_multiplicity, "lambda_max": report.max_eigenvalue(), "solver": report.solver}),
        ))
    }
);

check!(
    Isoperimetry,
    "isoperimetry",
    "edge boundaries meet both isoperimetric bounds",
    |ctx, name| {
        let n = ctx.graph.num_vertices();
        let (lambda, source) = match ctx.spectrum() {
            Some(r) => (r?.spectral_gap.unwrap_or(0.0), "measured"),
            None => (2.0, "lower bound"),
        };
        let k = ctx.curvature()?.ric;
        let mode = if n <= iso::EXHAUSTIVE_LIMIT {
            IsoMode::Exhaustive
        } else {
            IsoMode::Sampled {
                seed: ctx.seed,
                samples: ctx.samples,
            }
        };
        let v = iso::verify_isoperimetry(ctx.graph, mode, lambda, k)?;
        Ok(CheckOutcome::verdict(
            name,
            v.all_pass(),
            format!(
                "{} subsets ({}), {} failures, min slack {:.6}",
                v.checked,
                if mode == IsoMode::Exhaustive {
                    "exhaustive"
                } else {
                    "sampled"
                },
                v.failures,
                v.min_slack
            ),
            json!({"checked": v.checked, "failures": v.failures, "min_slack": v.min_slack, "lambda": lambda, "lambda_source": source, "k": k}),
        ))
    }
);

check!(
    Structure,
    "structure",
    "second-sphere classes and their dihedral subgroups",
    |ctx, name| {
        ctx.classes()?;
        let r = dihedral::verify_structure(ctx.grp)?;
        let failed: Vec<&str> = r
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name)
            .collect();
        Ok(CheckOutcome::verdict(
            name,
            failed.is_empty(),
            if failed.is_empty() {
                format!(
                    "{} classes over {} elements of B(2,e)",
                    r.classes.len(),
                    r.sphere2_size
                )
            } else {
                format!("failed: {}", failed.join(", "))
            },
            json!({"sphere2": r.sphere2_size, "classes": r.classes.len(), "checks": r.checks, "notes": r.notes}),
        ))
    }
);

check!(
    Dyer,
    "dyer",
    "t1 t2 = t3 t4 != e generates a dihedral subgroup",
    |ctx, name| {
        let r = dihedral::verify_lemma_dyer(ctx.grp, ctx.samples, ctx.seed);
        Ok(CheckOutcome::verdict(
            name,
            r.pass(),
            format!(
                "{} quadruples ({}), {} failures",
                r.quadruples,
                if r.exhaustive {
                    "exhaustive"
                } else {
                    "sampled"
                },
                r.failures
            ),
            serde_json::to_value(&r)?,
        ))
    }
);

check!(
    Estimates,
    "estimates",
    "dihedral and general quadratic estimates on random functions",
    |ctx, name| {
        let cls = ctx.classes()?;
        let est = estimates::EstimateContext::from_classes(ctx.grp, cls);
        let r = estimates::verify_with_context(&est, ctx.grp.order(), ctx.functions, ctx.seed)?;
        Ok(CheckOutcome::verdict(
            name,
            r.pass(),
            format!(
                "{} functions, min slack {:.6} (dihedral) / {:.6} (general)",
                r.general.functions, r.dihedral.min_slack, r.general.min_slack
            ),
            serde_json::to_value(&r)?,
        ))
    }
);

/// Check names in execution order.
pub const CHECKS: &[&str] = &[
    "root-counts",
    "reflections",
    "bruhat-regular",
    "triangle-free",
    "translation-invariance",
    "ricci-equals-two",
    "ricci-uniform",
    "ricci-upper-bound",
    "two-ball-locality",
    "gamma2-oracle",
    "spectral-gap",
    "isoperimetry",
    "structure",
    "dyer",
    "estimates",
];

pub fn check_by_name(name: &str) -> Result<Box<dyn Check>> {
    let c: Box<dyn Check> = match name {
        "root-counts" => Box::new(RootCounts),
        "reflections" => Box::new(Reflections),
        "bruhat-regular" => Box::new(BruhatRegular),
        "triangle-free" => Box::new(TriangleFree),
        "translation-invariance" => Box::new(TranslationInvariance),
        "ricci-equals-two" => Box::new(RicciEqualsTwo),
        "ricci-uniform" => Box::new(RicciUniform),
        "ricci-upper-bound" => Box::new(RicciUpperBound),
        "two-ball-locality" => Box::new(TwoBallLocality),
        "gamma2-oracle" => Box::new(Gamma2Oracle),
        "spectral-gap" => Box::new(SpectralGap),
        "isoperimetry" => Box::new(Isoperimetry),
        "structure" => Box::new(Structure),
        "dyer" => Box::new(Dyer),
        "estimates" => Box::new(Estimates),
        other => {
            return Err(Error::UnknownStrategy {
                kind: "check",
                name: other.to_string(),
            });
        }
    };
    Ok(c)
}

/// The named checks, or all of them when `only` is empty.
pub fn select_checks(only: &[String]) -> Result<Vec<Box<dyn Check>>> {
    if only.is_empty() {
        return CHECKS.iter().map(|n| check_by_name(n)).collect();
    }
    only.iter().map(|n| check_by_name(n)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckSuite {
    pub order: usize,
    pub seed: u64,
    pub outcomes: Vec<CheckOutcome>,
}

impl CheckSuite {
    pub fn pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.status != Status::Fail)
    }

    pub fn outcome(&self, name: &str) -> Option<&CheckOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }
}

/// Runs `checks` in order. An error inside a check becomes a failed outcome.
pub fn run_checks(ctx: &CheckContext, checks: &[Box<dyn Check>]) -> CheckSuite {
    let outcomes = checks
        .iter()
        .map(|c| {
            c.run(ctx).unwrap_or_else(|e| CheckOutcome {
                name: c.name(),
                status: Status::Fail,
                summary: format!("error: {e}"),
                data: Value::Null,
            })
        })
        .collect();
    CheckSuite {
        order: ctx.grp.order(),
        seed: ctx.seed,
        outcomes,
    }
}
