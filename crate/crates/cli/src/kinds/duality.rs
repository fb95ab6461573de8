//! Density form against Schatten dual form on a random discretization.

use dispersive_lab::dispersion::DispersionRelation;
use dispersive_lab::onstrichartz::{duality_check, random_onf, stream_rng, DualityReport, FrequencyWindow, SpacetimeOperator};
use dispersive_lab::spectral::Grid;
use serde::{Deserialize, Serialize};

use crate::config::{Config, Kind};
use crate::error::{CliError, CliResult};
use crate::table::Table;
use crate::{Check, Derived, Outcome};

pub const HEADER: &[&str] = &["trials", "density_sup", "schatten_sup", "ratio"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "n")]
    pub n: usize,
    #[serde(default = "box_len")]
    pub box_len: f64,
    /// Basis size of the discretization.
    #[serde(default = "members")]
    pub members: usize,
    #[serde(default = "window")]
    pub frequency_window: [f64; 2],
    #[serde(default = "members")]
    pub times: usize,
    #[serde(default = "one")]
    pub t_max: f64,
    pub beta: f64,
    pub q: f64,
    pub r: f64,
    /// Runs at `trials` and at `2·trials`.
    #[serde(default = "trials")]
    pub trials: usize,
}

fn n() -> usize {
    32
}
fn box_len() -> f64 {
    8.0
}
fn members() -> usize {
    16
}
fn window() -> [f64; 2] {
    [0.0, 12.0]
}
fn one() -> f64 {
    1.0
}
fn trials() -> usize {
    200
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tols {
    /// The two envelopes must agree within this factor.
    #[serde(default = "factor")]
    pub max_factor: f64,
    /// Largest relative change of the ratio when trials double.
    #[serde(default = "drift")]
    pub max_drift: f64,
}

fn factor() -> f64 {
    10.0
}
fn drift() -> f64 {
    0.25
}

pub fn run(cfg: &Config) -> CliResult<Outcome> {
    let params: Params = cfg.params()?;
    let tols: Tols = cfg.tols()?;
    let seed = cfg.require_seed()?;
    if params.trials == 0 || params.members == 0 || params.times < 2 || !(params.t_max > 0.0) {
        return Err(CliError::parse("need trials, members >= 1, times >= 2 and t_max > 0"));
    }
    let grid = Grid::new(1, params.n, params.box_len)?;
    let window = FrequencyWindow::new(params.frequency_window[0], params.frequency_window[1])?;
    let mut rng = stream_rng(seed, &[0]);
    let basis = random_onf(params.members, grid, window, &mut rng)?;
    let times: Vec<f64> = (0..params.times).map(|i| params.t_max * i as f64 / (params.times - 1) as f64).collect();
    let op = SpacetimeOperator::from_propagator(&basis.members, &DispersionRelation::schrodinger(), &times)?;
    let runs: Vec<DualityReport> = [params.trials, 2 * params.trials]
        .iter()
        .map(|&k| duality_check(&op, params.beta, params.q, params.r, k, seed))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(HEADER);
    for rep in &runs {
        table.push_nums(&[rep.trials as f64, rep.density_sup, rep.schatten_sup, rep.ratio]);
    }
    let derived = derive(&table)?;
    let checks = vec![
        Check::at_most("ratio_factor", derived["ratio_factor"], tols.max_factor),
        Check::at_most("drift", derived["drift"], tols.max_drift),
    ];
    super::finish(Kind::Duality, "density and Schatten dual forms have comparable constants", &params, &tols, table, super::to_json(&runs), checks)
}

/// `max(ratio, 1/ratio)` over the runs and the relative change of each envelope.
pub fn derive(table: &Table) -> CliResult<Derived> {
    let ratio = table.nums("ratio")?;
    let dens = table.nums("density_sup")?;
    let sch = table.nums("schatten_sup")?;
    if ratio.len() != 2 {
        return Err(CliError::parse("a duality table has exactly two rows"));
    }
    let mut out = Derived::new();
    out.insert("ratio_factor".into(), ratio.iter().map(|r| r.max(1.0 / r)).fold(0.0, f64::max));
    let rel = |v: &[f64]| (v[1] - v[0]).abs() / v[0].abs();
    out.insert("drift".into(), rel(&dens).max(rel(&sch)).max(rel(&ratio)));
    Ok(out)
}
