//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use coxric::dihedral::{self, verify_structure};
use coxric::estimates::verify_estimates;
use coxric::gamma::{self, global_ricci, local_ricci};
use coxric::graph::named::{complete, cycle, erdos_renyi, hypercube, path};
use coxric::group::{Group, IDENTITY};
use coxric::iso::{verify_isoperimetry, IsoMode};
use coxric::spectral::spectral_gap;
use coxric::Graph;

const CORPUS: &[&str] = &[
    "A1", "A1xA1", "A2", "A3", "A4", "B2", "B3", "B4", "D4", "H3", "F4", "I2(2)", "I2(3)", "I2(4)",
    "I2(5)", "I2(6)", "I2(7)", "I2(8)",
];

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bruhat(spec: &str) -> Result<(Group, Graph), String> {
    let grp = Group::from_spec(spec).map_err(|e| format!("{spec}: {e}"))?;
    let g = grp.bruhat_graph();
    Ok((grp, g))
}

fn e<E: std::fmt::Display>(ctx: &str) -> impl FnOnce(E) -> String + '_ {
    move |err| format!("{ctx}: {err}")
}

fn main_theorem() -> Outcome {
    let mut slowest = (String::new(), 0.0);
    for spec in CORPUS {
        let start = Instant::now();
        let (_, g) = bruhat(spec)?;
        let c = global_ricci(&g).map_err(e(spec))?;
        ensure((c.ric - 2.0).abs() <= 1e-8, || {
            format!("{spec}: Ric = {}", c.ric)
        })?;
        let t = start.elapsed().as_secs_f64();
        ensure(t < 60.0, || format!("{spec}: {t:.1}s"))?;
        if t > slowest.1 {
            slowest = (spec.to_string(), t);
        }
    }
    Ok(format!(
        "Ric = 2 ± 1e-8 at every vertex for {} groups (slowest {} in {:.2}s)",
        CORPUS.len(),
        slowest.0,
        slowest.1
    ))
}

fn spectral() -> Outcome {
    let mut min = f64::INFINITY;
    let mut count = 0;
    for spec in CORPUS {
        let (grp, g) = bruhat(spec)?;
        if grp.order() > 1200 {
            continue;
        }
        let r = spectral_gap(&g).map_err(e(spec))?;
        let gap = r.spectral_gap.ok_or_else(|| format!("{spec}: no gap"))?;
        ensure(gap >= 2.0 - 1e-8, || format!("{spec}: λ = {gap}"))?;
        min = min.min(gap);
        count += 1;
    }
    let a2 = spectral_gap(&bruhat("A2")?.1)
        .map_err(e("A2"))?
        .spectral_gap
        .unwrap_or(0.0);
    ensure((a2 - 3.0).abs() <= 1e-8, || format!("λ(A2) = {a2}"))?;
    let i22 = spectral_gap(&bruhat("I2(2)")?.1)
        .map_err(e("I2(2)"))?
        .spectral_gap
        .unwrap_or(0.0);
    ensure((i22 - 2.0).abs() <= 1e-8, || format!("λ(I2(2)) = {i22}"))?;
    Ok(format!(
        "λ >= 2 on {count} groups (min {min:.12}); λ(A2) = {a2:.12}, λ(I2(2)) = {i22:.12}"
    ))
}

fn oracle_on(g: &Graph, rng: &mut Xoshiro256PlusPlus, label: &str) -> Result<f64, String> {
    let n = g.num_vertices();
    let mut worst: f64 = 0.0;
    let mut f = vec![0.0; n];
    for _ in 0..100 {
        f.iter_mut().for_each(|v| *v = rng.gen_range(-1.0..=1.0));
        let x = rng.gen_range(0..n);
        worst = worst.max(gamma::gamma2_oracle_error(g, &f, x).map_err(e(label))?);
    }
    ensure(worst <= 1e-10, || {
        format!("{label}: relative error {worst:e}")
    })?;
    Ok(worst)
}

fn oracle() -> Outcome {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for spec in CORPUS {
        worst = worst.max(oracle_on(&bruhat(spec)?.1, &mut rng, spec)?);
    }
    let mut random = 0;
    let mut seed = 0;
    while random < 20 {
        seed += 1;
        let n = 8 + (seed as usize % 13);
        let g = erdos_renyi(n, 0.4, seed);
        if g.triangle_stats().max == 0 {
            continue;
        }
        worst = worst.max(oracle_on(
            &g,
            &mut rng,
            &format!("G({n}, 0.4) seed {seed}"),
        )?);
        random += 1;
    }
    Ok(format!(
        "closed form = definition on 100 functions × ({} corpus + 20 random graphs with triangles), max rel. error {worst:.2e}",
        CORPUS.len()
    ))
}

fn triangles() -> Outcome {
    for spec in CORPUS {
        let (_, g) = bruhat(spec)?;
        let t = g.triangle_stats().max;
        ensure(t == 0, || format!("{spec}: T_max = {t}"))?;
        let ric = global_ricci(&g).map_err(e(spec))?.ric;
        ensure(ric <= 2.0 + 1e-9, || format!("{spec}: Ric = {ric} > 2"))?;
    }
    let mut parts = Vec::new();
    for (name, g, cap) in [
        ("K4", complete(4), Some(4.0)),
        ("C6", cycle(6), None),
        ("Q3", hypercube(3), None),
    ] {
        let t = g.triangle_stats().max as f64;
        let ric = global_ricci(&g).map_err(e(name))?.ric;
        let bound = 2.0 + t / 2.0;
        ensure(ric <= bound + 1e-9, || {
            format!("{name}: Ric = {ric} > 2 + T/2 = {bound}")
        })?;
        if let Some(cap) = cap {
            ensure(ric <= cap, || format!("{name}: Ric = {ric} > {cap}"))?;
        }
        parts.push(format!("{name} Ric {ric:.6} <= {bound}"));
    }
    Ok(format!(
        "T_max = 0 and Ric <= 2 on the corpus; {}",
        parts.join(", ")
    ))
}

fn non_coxeter() -> Outcome {
    let cases: [(&str, Graph, usize, f64); 5] = [
        ("K2", complete(2), 0, 2.0),
        ("C4", cycle(4), 0, 2.0),
        ("C5", cycle(5), 0, 0.0),
        ("C6", cycle(6), 0, 0.0),
        ("P3 centre", path(3), 1, 0.5),
    ];
    for (name, g, x, want) in &cases {
        let ric = if *name == "P3 centre" {
            local_ricci(g, *x).map_err(e(name))?.ric
        } else {
            global_ricci(g).map_err(e(name))?.ric
        };
        ensure((ric - want).abs() <= 1e-9, || {
            format!("{name}: Ric = {ric}, want {want}")
        })?;
    }
    Ok("K2 = 2, C4 = 2, C5 = 0, C6 = 0, P3 centre = 0.5 (± 1e-9)".into())
}

fn isoperimetry() -> Outcome {
    let mut exhaustive = 0;
    for spec in ["A1", "A1xA1", "A2", "I2(4)", "I2(5)", "I2(6)"] {
        let (grp, g) = bruhat(spec)?;
        ensure(grp.order() <= 12, || {
            format!("{spec}: order {}", grp.order())
        })?;
        let lambda = spectral_gap(&g)
            .map_err(e(spec))?
            .spectral_gap
            .unwrap_or(0.0);
        let v = verify_isoperimetry(&g, IsoMode::Exhaustive, lambda, 2.0).map_err(e(spec))?;
        ensure(v.all_pass() && v.checked == 1 << grp.order(), || {
            format!("{spec}: {} failures of {}", v.failures, v.checked)
        })?;
        exhaustive += v.checked;
    }
    let mut sampled = 0;
    for spec in ["A3", "B3", "D4", "H3", "A4"] {
        let (_, g) = bruhat(spec)?;
        let lambda = spectral_gap(&g)
            .map_err(e(spec))?
            .spectral_gap
            .unwrap_or(0.0);
        let mode = IsoMode::Sampled {
            seed: 42,
            samples: 10_000,
        };
        let v = verify_isoperimetry(&g, mode, lambda, 2.0).map_err(e(spec))?;
        ensure(v.all_pass(), || {
            format!("{spec}: {} failures, min slack {}", v.failures, v.min_slack)
        })?;
        sampled += v.checked;
    }
    Ok(format!("{exhaustive} subsets exhaustively and {sampled} sampled (seed 42, stratified) all meet both bounds"))
}

fn structure() -> Outcome {
    let mut total = 0;
    for spec in ["A2", "A3", "B3", "B4", "D4", "H3", "F4"] {
        let (grp, _) = bruhat(spec)?;
        let r = verify_structure(&grp).map_err(e(spec))?;
        if let Some(c) = r.checks.iter().find(|c| !c.pass) {
            return Err(format!("{spec}: {} failed: {}", c.name, c.detail));
        }
        total += r.classes.len();
    }

    // B4: the product of two sign changes on orthogonal coordinates. The
    // sign changes are the conjugates of the generator on the 4-bond end.
    let (grp, _) = bruhat("B4")?;
    let flip = grp.simple()[3];
    let mut flips: Vec<usize> = (0..grp.order())
        .map(|w| grp.mult(grp.mult(w, flip), grp.inverse(w)))
        .collect();
    flips.sort_unstable();
    flips.dedup();
    ensure(flips.len() == 4, || {
        format!("B4 has {} sign changes", flips.len())
    })?;
    let u = grp.mult(flips[0], flips[1]);
    let cls = dihedral::classes(&grp).map_err(e("B4"))?;
    let class = cls
        .iter()
        .find(|c| c.members.contains(&u))
        .ok_or("B4: r_e1 r_e2 is not in the second sphere")?;
    let sub = &class.subgroup;
    ensure(
        class.members.len() == 3 && sub.reflections.len() == 4 && sub.order == 8,
        || {
            format!(
                "B4 documented class: {} members, {} reflections, order {}",
                class.members.len(),
                sub.reflections.len(),
                sub.order
            )
        },
    )?;
    let report = verify_structure(&grp).map_err(e("B4"))?;
    let summary = report
        .classes
        .iter()
        .find(|c| c.members.contains(&u))
        .ok_or("B4: class missing from report")?;
    ensure(summary.involution_in_larger_dihedral, || {
        "B4: order-8 discrepancy not flagged".into()
    })?;
    ensure(
        report
            .notes
            .iter()
            .any(|n| n.contains(&format!("involution {u} "))),
        || "B4: no note for the documented involution".into(),
    )?;
    Ok(format!(
        "all structure checks pass on 7 groups ({total} classes); B4 class of r_e1 r_e2: 3 members, 4 reflections, order 8 (flagged)"
    ))
}

fn estimates() -> Outcome {
    let mut worst = (f64::INFINITY, f64::INFINITY);
    for spec in [
        "I2(3)", "I2(4)", "I2(5)", "I2(6)", "I2(7)", "I2(8)", "A2", "A3", "B3",
    ] {
        let (grp, _) = bruhat(spec)?;
        let r = verify_estimates(&grp, 1000, 99).map_err(e(spec))?;
        ensure(r.dihedral.functions == 1000, || {
            format!("{spec}: {} functions", r.dihedral.functions)
        })?;
        ensure(r.dihedral.min_slack >= -1e-9, || {
            format!("{spec}: dihedral slack {}", r.dihedral.min_slack)
        })?;
        ensure(r.general.min_slack >= -1e-9, || {
            format!("{spec}: general slack {}", r.general.min_slack)
        })?;
        worst = (
            worst.0.min(r.dihedral.min_slack),
            worst.1.min(r.general.min_slack),
        );
    }
    Ok(format!(
        "1000 functions per group on 9 groups; min slack {:.6} (dihedral), {:.6} (general)",
        worst.0, worst.1
    ))
}

fn locality() -> Outcome {
    let mut checked = 0;
    for spec in ["A3", "B3"] {
        let (_, g) = bruhat(spec)?;
        for x in 0..g.num_vertices() {
            let full = local_ricci(&g, x).map_err(e(spec))?.ric;
            let (sub, order) = g.two_ball_subgraph(x);
            ensure(order[0] == x, || format!("{spec}: base not first"))?;
            let local = local_ricci(&sub, 0).map_err(e(spec))?.ric;
            ensure((full - local).abs() <= 1e-9, || {
                format!("{spec} at {x}: {full} vs {local}")
            })?;
            checked += 1;
        }
    }
    let mut worst: f64 = 0.0;
    for spec in CORPUS {
        let (_, g) = bruhat(spec)?;
        let c = global_ricci(&g).map_err(e(spec))?;
        ensure(c.spread() <= 1e-9, || {
            format!("{spec}: spread {}", c.spread())
        })?;
        ensure(c.per_vertex[0].0 == IDENTITY, || {
            format!("{spec}: identity not evaluated")
        })?;
        worst = worst.max(c.spread());
    }
    Ok(format!(
        "two-ball locality at {checked} vertices of A3, B3; per-vertex spread <= {worst:.2e} on the corpus"
    ))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_coxric"))
            .args(["check", "A3", "--seed", "7", "--json"])
            .output()
            .map_err(|err| format!("spawn: {err}"))
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success() && b.status.success(), || {
        format!("exit status {:?} / {:?}", a.status.code(), b.status.code())
    })?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || {
        "outputs differ".into()
    })?;
    Ok(format!(
        "`coxric check A3 --seed 7 --json` twice: {} identical bytes",
        a.stdout.len()
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("main theorem", main_theorem),
        ("spectral gap", spectral),
        ("operator oracle", oracle),
        ("triangle-freeness", triangles),
        ("non-Coxeter oracles", non_coxeter),
        ("isoperimetry", isoperimetry),
        ("structure suite", structure),
        ("proof-step inequalities", estimates),
        ("locality and symmetry", locality),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "PASS criterion {:>2} ({name}): {detail} [{secs:.1}s]",
                i + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "FAIL criterion {:>2} ({name}): {detail} [{secs:.1}s]",
                    i + 1
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
