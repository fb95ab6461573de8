//! Hartree fixed point for a rank-two datum: bisection for the horizon and
//! the response of the contraction factor to the interaction strength.

use std::f64::consts::PI;

use dispersive_lab::applications::{hartree_bisect, hartree_fixed_point, HartreeOptions, HartreeState, SolutionNorm};
use dispersive_lab::dispersion::DispersionRelation;
use dispersive_lab::norms::OperatorMatrix;
use dispersive_lab::spectral::{Field, Grid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{Config, Kind};
use crate::error::{CliError, CliResult};
use crate::table::Table;
use crate::{Check, Derived, Outcome};

pub const HEADER: &[&str] = &["run", "horizon", "iteration", "ratio"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "n")]
    pub n: usize,
    #[serde(default = "box_len")]
    pub box_len: f64,
    /// Order of `φ = |ξ|^α`.
    pub alpha: f64,
    /// `w = strength·e^{−2x²}`.
    pub strength: f64,
    #[serde(default = "occupations")]
    pub nu: [f64; 2],
    pub norm: SolutionNorm,
    #[serde(default = "start")]
    pub start_horizon: f64,
    #[serde(default = "theta")]
    pub theta: f64,
    #[serde(default = "tol")]
    pub tol: f64,
    #[serde(default = "max_iter")]
    pub max_iter: usize,
    #[serde(default = "steps")]
    pub steps: usize,
    /// Also run at half the strength on the accepted horizon.
    #[serde(default = "yes")]
    pub compare_half: bool,
}

fn n() -> usize {
    32
}
fn box_len() -> f64 {
    4.0 * PI
}
fn occupations() -> [f64; 2] {
    [1.0, 0.6]
}
fn start() -> f64 {
    0.25
}
fn theta() -> f64 {
    0.5
}
fn tol() -> f64 {
    1e-9
}
fn max_iter() -> usize {
    50
}
fn steps() -> usize {
    6
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tols {
    #[serde(default = "max_residual")]
    pub max_residual: f64,
    #[serde(default = "max_iter")]
    pub max_iterations: usize,
    #[serde(default = "half_range")]
    pub half_factor_range: [f64; 2],
}

fn max_residual() -> f64 {
    1e-8
}
fn half_range() -> [f64; 2] {
    [1.6, 2.4]
}

/// `e^{−x²}` and `(x + 0.3i)e^{−0.7(x−0.5)²}`, Gram–Schmidt orthonormalized.
pub fn rank_two_datum(grid: Grid, nu: [f64; 2]) -> CliResult<OperatorMatrix> {
    let a = Field::from_fn(grid, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
    let b = Field::from_fn(grid, |x| Complex64::new(x[0], 0.3) * (-0.7 * (x[0] - 0.5).powi(2)).exp());
    let a = a.scale(Complex64::new(1.0 / a.l2_norm(), 0.0));
    let b = b.sub(&a.scale(a.inner(&b)));
    let b = b.scale(Complex64::new(1.0 / b.l2_norm(), 0.0));
    Ok(OperatorMatrix::from_family(&[a, b], &nu)?)
}

pub fn potential(grid: Grid, strength: f64) -> Field {
    Field::from_fn(grid, |x| Complex64::new(strength * (-2.0 * x[0] * x[0]).exp(), 0.0))
}

pub fn run(cfg: &Config) -> CliResult<Outcome> {
    let params: Params = cfg.params()?;
    let tols: Tols = cfg.tols()?;
    if !(params.strength.is_finite() && params.strength != 0.0) || params.steps == 0 {
        return Err(CliError::parse("need a finite nonzero strength and at least one bisection step"));
    }
    let grid = Grid::new(1, params.n, params.box_len)?;
    let gamma = rank_two_datum(grid, params.nu)?;
    let phi = DispersionRelation::Power { alpha: params.alpha };
    let state = HartreeState::new(phi, gamma, potential(grid, params.strength), params.start_horizon, params.norm)?;
    let opts = HartreeOptions::default();
    let bis = hartree_bisect(&state, params.theta, params.tol, params.max_iter, params.steps, opts)?;

    let mut table = Table::new(HEADER);
    for (k, r) in bis.report.ratios.iter().enumerate() {
        table.push_nums(&[0.0, bis.t0, (k + 1) as f64, *r]);
    }
    let mut results = serde_json::json!({
        "t0": bis.t0,
        "probes": bis.probes,
        "outcome": bis.report.outcome,
        "iterations": bis.report.iterations,
        "residual": bis.report.residual,
        "contraction": bis.report.contraction,
        "nodes": bis.report.nodes,
        "interaction_norm": bis.report.interaction_norm,
    });
    let mut checks = vec![
        Check::new("contraction", bis.report.contraction, "< 1".into(), bis.report.contraction < 1.0),
        Check::at_most("residual", bis.report.residual, tols.max_residual),
        Check::at_most("iterations", bis.report.iterations as f64, tols.max_iterations as f64),
    ];
    if params.compare_half {
        let half = state.with_horizon(bis.t0)?.with_potential(potential(grid, params.strength / 2.0))?;
        let rep = hartree_fixed_point(&half, params.tol, params.max_iter, opts)?;
        for (k, r) in rep.ratios.iter().enumerate() {
            table.push_nums(&[1.0, bis.t0, (k + 1) as f64, *r]);
        }
        let factor = bis.report.contraction / rep.contraction;
        results["half_strength"] = serde_json::json!({"contraction": rep.contraction, "iterations": rep.iterations, "residual": rep.residual, "factor": factor});
        let [lo, hi] = tols.half_factor_range;
        checks.push(Check::new("half_strength_factor", factor, format!("in [{lo}, {hi}]"), factor >= lo && factor <= hi));
    }
    super::finish(Kind::Hartree, "Hartree iteration contracts on a short horizon", &params, &tols, table, results, checks)
}

/// Contraction per run (largest ratio) and their quotient.
pub fn derive(table: &Table) -> CliResult<Derived> {
    let run = table.nums("run")?;
    let ratio = table.nums("ratio")?;
    let mut out = Derived::new();
    let mut by_run = [0.0f64; 2];
    for (r, v) in run.iter().zip(&ratio) {
        let k = *r as usize;
        if *r != k as f64 || k > 1 {
            return Err(CliError::parse(format!("bad run index {r}")));
        }
        by_run[k] = by_run[k].max(*v);
    }
    out.insert("contraction".into(), by_run[0]);
    if run.iter().any(|r| *r == 1.0) {
        out.insert("half_strength_contraction".into(), by_run[1]);
        out.insert("half_strength_factor".into(), by_run[0] / by_run[1]);
    }
    Ok(out)
}
