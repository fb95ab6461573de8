//! Refined (β > 1) Strichartz bound on a seeded corpus of multi-shell data.

use dispersive_lab::dispersion::DispersionRelation;
use dispersive_lab::onstrichartz::{refined_corpus, TimeWindow};
use dispersive_lab::spectral::Grid;
use serde::{Deserialize, Serialize};

use crate::config::{Config, Kind};
use crate::error::{CliError, CliResult};
use crate::table::Table;
use crate::{Check, Derived, Outcome};

pub const HEADER: &[&str] = &["index", "lhs", "rhs", "ratio", "rhs_beta_one", "gain", "triangle"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "n")]
    pub n: usize,
    #[serde(default = "box_len")]
    pub box_len: f64,
    /// Order of `φ = |ξ|^α`.
    pub alpha: f64,
    pub q: f64,
    pub r: f64,
    pub beta: f64,
    pub s: f64,
    pub window: TimeWindow,
    #[serde(default = "count")]
    pub count: usize,
}

fn n() -> usize {
    128
}
fn box_len() -> f64 {
    std::f64::consts::TAU
}
fn count() -> usize {
    100
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tols {}

pub fn run(cfg: &Config) -> CliResult<Outcome> {
    let params: Params = cfg.params()?;
    let tols: Tols = cfg.tols()?;
    let seed = cfg.require_seed()?;
    if params.count == 0 {
        return Err(CliError::parse("count must be positive"));
    }
    let window = TimeWindow::new(params.window.start, params.window.end, params.window.samples)?;
    let grid = Grid::new(1, params.n, params.box_len)?;
    let phi = DispersionRelation::Power { alpha: params.alpha };
    let reports = refined_corpus(grid, &phi, params.q, params.r, params.beta, params.s, window, params.count, seed)?;
    let mut table = Table::new(HEADER);
    for (i, rep) in reports.iter().enumerate() {
        table.push_nums(&[i as f64, rep.lhs, rep.rhs, rep.ratio, rep.rhs_beta_one, rep.gain, rep.triangle]);
    }
    let derived = derive(&table)?;
    let checks = vec![
        Check::new("max_ratio", derived["max_ratio"], "finite".into(), derived["max_ratio"].is_finite()),
        Check::at_most("triangle_violations", derived["triangle_violations"], 0.0),
    ];
    super::finish(Kind::Refined, "refined Strichartz bound with shell summability β", &params, &tols, table, super::to_json(&reports), checks)
}

pub fn derive(table: &Table) -> CliResult<Derived> {
    let ratio = table.nums("ratio")?;
    let lhs = table.nums("lhs")?;
    let tri = table.nums("triangle")?;
    let gain = table.nums("gain")?;
    let mut out = Derived::new();
    out.insert("max_ratio".into(), ratio.iter().cloned().fold(f64::NAN, f64::max));
    out.insert("max_gain".into(), gain.iter().cloned().fold(f64::NAN, f64::max));
    let violations = lhs.iter().zip(&tri).filter(|(l, t)| **l > **t * (1.0 + 1e-12)).count();
    out.insert("triangle_violations".into(), violations as f64);
    Ok(out)
}
