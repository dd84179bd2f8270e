//! Report rendering, float rounding and exit codes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Json,
    Csv,
    Dot,
}

/// Everything that shaped a run, echoed into each report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub input: String,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub force: bool,
    pub version: &'static str,
}

impl RunConfig {
    pub fn new(command: &'static str, input: &str, format: Format, force: bool) -> Self {
        Self {
            command,
            input: input.to_string(),
            format,
            seed: None,
            samples: None,
            solver: None,
            tol: None,
            force,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// A rendered command result. `pass` is `None` when nothing was asserted.
pub struct Report {
    pub json: Value,
    pub table: String,
    pub csv: Option<String>,
    pub dot: Option<String>,
    pub pass: Option<bool>,
}

impl Report {
    pub fn new(json: Value, table: String, pass: Option<bool>) -> Self {
        Self {
            json,
            table,
            csv: None,
            dot: None,
            pass,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_dot(mut self, dot: String) -> Self {
        self.dot = Some(dot);
        self
    }
}

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<coxric::Error> for Failure {
    fn from(e: coxric::Error) -> Self {
        use coxric::Error as E;
        let code = match e {
            E::Internal(_)
            | E::NoConvergence(_)
            | E::RootClosureDiverged(_)
            | E::DedupAmbiguity(_)
            | E::RootNotFound(_) => 1,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Rounds every float inside a JSON value.
pub fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Human-readable float with 12 significant digits.
pub fn fmt(x: f64) -> String {
    let r = round12(x);
    if r != 0.0 && r.is_finite() && (r.abs() < 1e-4 || r.abs() >= 1e15) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn verdict(pass: Option<bool>) -> &'static str {
    match pass {
        Some(true) => "PASS",
        Some(false) => "FAIL",
        None => "n/a",
    }
}

pub fn emit(cfg: &RunConfig, report: Report, out: Option<&PathBuf>) -> Result<ExitCode, Failure> {
    let header = serde_json::to_string(cfg).map_err(coxric::Error::from)?;
    let text = match cfg.format {
        Format::Json => {
            let mut doc = json!({
                "config": cfg,
                "report": report.json,
                "verdict": verdict(report.pass),
            });
            round_value(&mut doc);
            let mut s = serde_json::to_string_pretty(&doc).map_err(coxric::Error::from)?;
            s.push('\n');
            s
        }
        Format::Table => {
            let mut s = String::new();
            writeln!(s, "# coxric {} {}", cfg.command, header).unwrap();
            s.push_str(&report.table);
            if !report.table.ends_with('\n') {
                s.push('\n');
            }
            writeln!(s, "verdict: {}", verdict(report.pass)).unwrap();
            s
        }
        Format::Csv => {
            let body = report
                .csv
                .ok_or_else(|| Failure::usage(format!("`{}` has no csv output", cfg.command)))?;
            format!("# {header}\n{body}")
        }
        Format::Dot => report
            .dot
            .ok_or_else(|| Failure::usage(format!("`{}` has no dot output", cfg.command)))?,
    };
    write_text(&text, out)?;
    Ok(match report.pass {
        Some(false) => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    })
}

/// Writes to `out` or stdout. A closed stdout pipe is not an error.
pub fn write_text(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(coxric::Error::from)?,
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            other => other.map_err(coxric::Error::from)?,
        },
    }
    Ok(())
}
