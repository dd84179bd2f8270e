//! End-to-end runs of the `coxric` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn coxric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coxric"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let out = coxric(&full);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("coxric-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn group_summaries() {
    let r = json(&["group", "A3"]);
    assert_eq!(r["report"]["order"], 24);
    assert_eq!(r["report"]["reflections"], 6);
    let r = json(&["group", "I2(5)"]);
    assert_eq!(
        (
            r["report"]["order"].as_u64(),
            r["report"]["reflections"].as_u64()
        ),
        (Some(10), Some(5))
    );
    let r = json(&["group", "A1xA2"]);
    assert_eq!(
        (
            r["report"]["order"].as_u64(),
            r["report"]["reflections"].as_u64()
        ),
        (Some(12), Some(4))
    );
    assert_eq!(r["config"]["command"], "group");
    assert_eq!(r["verdict"], "n/a");
}

#[test]
fn ricci_reports() {
    let r = json(&["ricci", "B3"]);
    assert!((r["report"]["ric"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert_eq!(r["report"]["evaluated"], 48);
    assert_eq!(r["verdict"], "PASS");

    let r = json(&["ricci", "F4", "--vertex", "e"]);
    assert!((r["report"]["ric"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert_eq!(r["report"]["method"], "transitive");

    let c5 = scratch("c5.edges");
    std::fs::write(&c5, "# five-cycle\n0 1\n1 2\n2 3\n3 4\n4 0\n").unwrap();
    let r = json(&["ricci", "--graph", c5.to_str().unwrap()]);
    assert_eq!(r["report"]["ric"].as_f64(), Some(0.0));
    assert_eq!(r["verdict"], "n/a");
}

#[test]
fn minimizer_is_normalized() {
    let r = json(&["ricci", "A2", "--vertex", "s1s2", "--emit-minimizer"]);
    let entry = &r["report"]["per_vertex"][0];
    assert_eq!(entry["label"], "s1s2");
    let values = entry["minimizer"]["values"].as_object().unwrap();
    // x, its 3 neighbours, and the 2 vertices of the second sphere
    assert_eq!(values.len(), 6);
}

#[test]
fn spectral_and_iso() {
    let r = json(&["spectral", "A2"]);
    assert!((r["report"]["gap"].as_f64().unwrap() - 3.0).abs() < 1e-8);
    assert_eq!(r["verdict"], "PASS");
    let r = json(&["iso", "A3", "--samples", "10000", "--seed", "42"]);
    assert_eq!(r["report"]["failures"], 0);
    assert_eq!(r["report"]["checked"], 10_000 + 23);
    assert_eq!(r["verdict"], "PASS");
    let r = json(&["iso", "A2", "--exhaustive"]);
    assert_eq!(r["report"]["checked"], 64);
}

#[test]
fn classes_of_b4() {
    let r = json(&["classes", "B4"]);
    let classes = r["report"]["classes"].as_array().unwrap();
    assert!(classes.iter().any(|c| c["size"] == 3
        && c["reflections"].as_array().unwrap().len() == 4
        && c["subgroup_order"] == 8));
    assert!(!r["report"]["notes"].as_array().unwrap().is_empty());
    assert_eq!(r["verdict"], "PASS");
}

#[test]
fn check_selection() {
    let r = json(&["check", "I2(4)", "--only", "ricci-equals-two,dyer"]);
    let checks = r["report"]["checks"].as_array().unwrap();
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["ricci-equals-two", "dyer"]);
    assert_eq!(r["verdict"], "PASS");
    let out = coxric(&["check", "--list"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("estimates"));
}

#[test]
fn exit_codes() {
    assert_eq!(coxric(&["group", "A3"]).status.code(), Some(0));
    assert_eq!(coxric(&["group", "Q7"]).status.code(), Some(2));
    assert_eq!(coxric(&["ricci", "H4"]).status.code(), Some(2));
    assert_eq!(
        coxric(&["check", "A3", "--only", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        coxric(&["iso", "A4", "--exhaustive"]).status.code(),
        Some(2)
    );
    assert_eq!(coxric(&["frobnicate"]).status.code(), Some(2));
    // an overstated gap and curvature make the bound fail
    let out = coxric(&["iso", "A2", "--exhaustive", "--lambda", "100", "--k", "100"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_formats() {
    let out = coxric(&["ricci", "A2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    assert_eq!(lines.next(), Some("vertex,label,ric"));
    assert_eq!(lines.next(), Some("0,e,2"));

    let out = coxric(&["group", "A2", "--format", "dot"]);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("graph \"A2\""));
    assert_eq!(
        coxric(&["spectral", "A2", "--format", "dot"]).status.code(),
        Some(2)
    );

    let path = scratch("a3.json");
    let out = coxric(&["check", "A2", "--json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["config"]["input"], "A2");
}

#[test]
fn exports_read_back() {
    let edges = scratch("a3-bruhat.json");
    let out = coxric(&[
        "export",
        "A3",
        "--what",
        "bruhat",
        "--json",
        "--out",
        edges.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let r = json(&["ricci", "--graph", edges.to_str().unwrap()]);
    assert!((r["report"]["ric"].as_f64().unwrap() - 2.0).abs() < 1e-9);

    let matrix = scratch("b3.json");
    let out = coxric(&[
        "export",
        "B3",
        "--what",
        "matrix",
        "--json",
        "--out",
        matrix.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let r = json(&["group", matrix.to_str().unwrap()]);
    assert_eq!(r["report"]["order"], 48);

    let out = coxric(&["export", "A2", "--what", "roots", "--json"]);
    let roots: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(roots["roots"].as_array().unwrap().len(), 6);
}

#[test]
fn floats_have_twelve_significant_digits() {
    let r = json(&[
        "ricci",
        "--graph",
        write_p3().to_str().unwrap(),
        "--vertex",
        "1",
    ]);
    assert_eq!(r["report"]["ric"].as_f64(), Some(0.5));
    let r = json(&["spectral", "I2(7)"]);
    for v in r["report"]["eigenvalues"].as_array().unwrap() {
        let s = v.to_string();
        let digits = s
            .trim_start_matches('-')
            .split('e')
            .next()
            .unwrap()
            .replace('.', "");
        assert!(digits.trim_start_matches('0').len() <= 12, "{s}");
    }
}

fn write_p3() -> PathBuf {
    let p = scratch("p3.edges");
    std::fs::write(&p, "0 1\n1 2\n").unwrap();
    p
}
