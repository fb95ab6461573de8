//! Config-driven experiment runner for `dispersive-lab`.
//!
//! `run` executes one experiment and writes `report.json` and `data.csv`;
//! `replay` re-derives every recorded statistic from `data.csv` alone.

pub mod config;
pub mod error;
pub mod kinds;
pub mod table;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use config::{Config, Kind};
pub use error::{CliError, CliResult};
use table::{format_float, parse_float, Table};

/// Relative tolerance for replayed statistics.
pub const REPLAY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance condition, e.g. `"<= 2.5"`.
    pub condition: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, condition: String, pass: bool) -> Self {
        Self { name: name.into(), value, condition, pass }
    }

    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, format!("<= {bound}"), value <= bound)
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, format!(">= {bound}"), value >= bound)
    }

    pub fn within(name: &str, value: f64, target: f64, tol: f64) -> Self {
        Self::new(name, value, format!("{target} ± {tol}"), (value - target).abs() <= tol)
    }
}

/// Statistics recomputable from the CSV.
pub type Derived = BTreeMap<String, f64>;

pub struct Outcome {
    pub claim: String,
    pub parameters: Value,
    pub tolerances: Value,
    pub table: Table,
    pub results: Value,
    pub checks: Vec<Check>,
    pub derived: Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub package: String,
    pub version: String,
    pub os: String,
    pub arch: String,
    pub threads: usize,
    pub unix_time: u64,
}

impl Environment {
    fn stamp() -> Self {
        Self {
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            threads: rayon::current_num_threads(),
            unix_time: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// What the experiment tests, in words.
    pub claim: String,
    pub kind: Kind,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub tolerances: Value,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    pub results: Value,
    #[serde(with = "exact_map")]
    pub derived: Derived,
    pub columns: Vec<String>,
    pub rows: usize,
    pub environment: Environment,
}

/// Finite values as JSON numbers, the rest as `"inf"`, `"-inf"`, `"nan"`.
mod exact_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(map: &Derived, s: S) -> Result<S::Ok, S::Error> {
        let out: BTreeMap<&String, Value> = map
            .iter()
            .map(|(k, v)| {
                let j = serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or_else(|| Value::String(format_float(*v)));
                (k, j)
            })
            .collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Derived, D::Error> {
        let raw: BTreeMap<String, Value> = BTreeMap::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                let x = match &v {
                    Value::Number(n) => n.as_f64(),
                    Value::String(s) => parse_float(s),
                    _ => None,
                };
                x.map(|x| (k.clone(), x)).ok_or_else(|| serde::de::Error::custom(format!("bad derived value for {k}")))
            })
            .collect()
    }
}

/// Adds `sum:<column>` for every numeric column, so any edited row shows up on replay.
pub fn with_column_sums(mut derived: Derived, table: &Table) -> Derived {
    for (c, name) in table.header.iter().enumerate() {
        let mut total = 0.0;
        let mut numeric = true;
        for r in 0..table.rows.len() {
            match table.num(r, c) {
                Ok(v) => total += v,
                Err(_) => numeric = false,
            }
        }
        if numeric {
            derived.insert(format!("sum:{name}"), total);
        }
    }
    derived
}

/// Where `run` should put its files and what seed to use.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Parses `path`, runs the experiment and writes the report directory.
/// Nothing is written unless the experiment completes.
pub fn run_config(path: &Path, overrides: &Overrides) -> CliResult<(PathBuf, Report)> {
    let text = fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let mut cfg = Config::parse(&text)?;
    if overrides.seed.is_some() {
        cfg.seed = overrides.seed;
    }
    let dir = overrides
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| CliError::parse("no output directory: set output_dir or pass --out"))?;
    let outcome = kinds::run(&cfg)?;
    let report = Report {
        claim: outcome.claim,
        kind: cfg.kind,
        parameters: outcome.parameters,
        seed: cfg.seed,
        tolerances: outcome.tolerances,
        verdict: if outcome.checks.iter().all(|c| c.pass) { Verdict::Pass } else { Verdict::Fail },
        checks: outcome.checks,
        results: outcome.results,
        derived: outcome.derived,
        columns: outcome.table.header.iter().map(|s| s.to_string()).collect(),
        rows: outcome.table.rows.len(),
        environment: Environment::stamp(),
    };
    write_outputs(&dir, &report, &outcome.table)?;
    Ok((dir, report))
}

fn write_outputs(dir: &Path, report: &Report, table: &Table) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    let csv_tmp = dir.join(".data.csv.partial");
    let json_tmp = dir.join(".report.json.partial");
    let mut csv_bytes = Vec::new();
    table.write_csv(&mut csv_bytes)?;
    fs::write(&csv_tmp, csv_bytes)?;
    let json = serde_json::to_string_pretty(report).map_err(|e| CliError::Runtime(e.to_string()))?;
    fs::write(&json_tmp, json + "\n")?;
    fs::rename(&csv_tmp, dir.join("data.csv"))?;
    fs::rename(&json_tmp, dir.join("report.json"))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub key: String,
    pub recorded: Option<f64>,
    pub replayed: Option<f64>,
}

fn agrees(a: f64, b: f64) -> bool {
    if a.is_nan() || b.is_nan() {
        return a.is_nan() && b.is_nan();
    }
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= REPLAY_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Re-derives the report's statistics from `data.csv`; returns the disagreements.
pub fn replay(dir: &Path) -> CliResult<Vec<Mismatch>> {
    let report_path = dir.join("report.json");
    let text = fs::read_to_string(&report_path).map_err(|e| CliError::parse(format!("{}: {e}", report_path.display())))?;
    let report: Report = serde_json::from_str(&text).map_err(|e| CliError::parse(format!("report.json: {e}")))?;
    let csv_path = dir.join("data.csv");
    let bytes = fs::read(&csv_path).map_err(|e| CliError::parse(format!("{}: {e}", csv_path.display())))?;
    // every written table ends in a newline; anything else was cut short
    if bytes.last() != Some(&b'\n') {
        return Err(CliError::parse("data.csv is truncated"));
    }
    let table = Table::read_csv(bytes.as_slice(), kinds::header(report.kind), kinds::text_columns(report.kind))?;
    if table.rows.len() != report.rows {
        return Err(CliError::parse(format!("data.csv has {} rows, the report records {}", table.rows.len(), report.rows)));
    }
    let replayed = kinds::derive(report.kind, &report.parameters, &table)?;
    let mut out = Vec::new();
    for key in report.derived.keys().chain(replayed.keys()) {
        let (a, b) = (report.derived.get(key).copied(), replayed.get(key).copied());
        let ok = matches!((a, b), (Some(x), Some(y)) if agrees(x, y));
        if !ok && !out.iter().any(|m: &Mismatch| &m.key == key) {
            out.push(Mismatch { key: key.clone(), recorded: a, replayed: b });
        }
    }
    Ok(out)
}
