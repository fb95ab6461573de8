//! Velocity averages `∫ f(x − t∇φ(ξ), ξ) Ψ(ξ)^{−2s} dξ` of a one-dimensional datum.

use dispersive_lab::applications::{velocity_average, PhaseSpaceFunction, VelocityOptions};
use dispersive_lab::dispersion::DispersionRelation;
use dispersive_lab::norms::trapezoid_weights;
use dispersive_lab::onstrichartz::Psi;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Config, Kind};
use crate::error::{CliError, CliResult};
use crate::table::Table;
use crate::{Check, Derived, Outcome};

pub const HEADER: &[&str] = &["t", "x", "value"];

/// Built-in phase-space data on `ℝ × ℝ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Datum {
    /// `e^{−x²−v²}` on `[−9, 9] × [−3, 3]`.
    Gaussian,
    /// `b(x)b(v)` with `b(u) = e^{−1/(1−u²)}` on `[−1, 1]²`.
    Bump,
    /// `e^{−(x−0.4v)²} b(v−0.2)(1+0.5v)` on `[−9, 9] × [−0.8, 1.2]`.
    Asymmetric,
}

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

impl Datum {
    pub fn function(self) -> PhaseSpaceFunction {
        let built = match self {
            Datum::Gaussian => PhaseSpaceFunction::from_fn(|x, v| (-x[0] * x[0] - v[0] * v[0]).exp(), vec![(-9.0, 9.0)], vec![(-3.0, 3.0)]),
            Datum::Bump => PhaseSpaceFunction::from_fn(|x, v| bump(x[0]) * bump(v[0]), vec![(-1.0, 1.0)], vec![(-1.0, 1.0)]),
            Datum::Asymmetric => PhaseSpaceFunction::from_fn(
                |x, v| (-(x[0] - 0.4 * v[0]).powi(2)).exp() * bump(v[0] - 0.2) * (1.0 + 0.5 * v[0]),
                vec![(-9.0, 9.0)],
                vec![(-0.8, 1.2)],
            ),
        };
        built.expect("built-in boxes are valid")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub datum: Datum,
    pub phi: DispersionRelation,
    #[serde(default)]
    pub s: f64,
    #[serde(default = "homogeneous")]
    pub psi: Psi,
    pub times: Vec<f64>,
    pub x_min: f64,
    pub x_max: f64,
    pub x_count: usize,
}

fn homogeneous() -> Psi {
    Psi::Homogeneous
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tols {
    /// Largest relative change of `∫ρ dx` against the first time.
    #[serde(default = "mass_rtol")]
    pub mass_rtol: f64,
}

fn mass_rtol() -> f64 {
    1e-6
}

pub fn run(cfg: &Config) -> CliResult<Outcome> {
    let params: Params = cfg.params()?;
    let tols: Tols = cfg.tols()?;
    if params.times.is_empty() || params.x_count < 2 || !(params.x_max > params.x_min) {
        return Err(CliError::parse("need times, x_count >= 2 and x_min < x_max"));
    }
    let f = params.datum.function();
    let xs: Vec<f64> = (0..params.x_count)
        .map(|i| params.x_min + (params.x_max - params.x_min) * i as f64 / (params.x_count - 1) as f64)
        .collect();
    let mut table = Table::new(HEADER);
    for &t in &params.times {
        let values: Vec<f64> = xs
            .par_iter()
            .map(|&x| velocity_average(&f, &params.phi, params.s, params.psi, t, &[x], VelocityOptions::default()))
            .collect::<Result<_, _>>()?;
        for (x, v) in xs.iter().zip(values) {
            table.push_nums(&[t, *x, v]);
        }
    }
    let derived = derive(&table)?;
    let checks = vec![Check::at_most("mass_drift", derived["mass_drift"], tols.mass_rtol)];
    super::finish(Kind::Kinetic, "velocity averages transport phase-space mass", &params, &tols, table, serde_json::Value::Null, checks)
}

/// Trapezoid mass per time, in row order, and the largest relative drift.
pub fn derive(table: &Table) -> CliResult<Derived> {
    let t = table.nums("t")?;
    let x = table.nums("x")?;
    let v = table.nums("value")?;
    let mut out = Derived::new();
    let mut masses = Vec::new();
    let mut start = 0;
    while start < t.len() {
        let mut end = start;
        while end < t.len() && t[end] == t[start] {
            end += 1;
        }
        if end - start < 2 {
            return Err(CliError::parse(format!("time {} has fewer than two x samples", t[start])));
        }
        let w = trapezoid_weights(&x[start..end]);
        let m: f64 = w.iter().zip(&v[start..end]).map(|(a, b)| a * b).sum();
        out.insert(format!("mass@t={}", t[start]), m);
        masses.push(m);
        start = end;
    }
    let drift = masses.iter().map(|m| (m - masses[0]).abs() / masses[0].abs()).fold(0.0, f64::max);
    out.insert("mass_drift".into(), drift);
    Ok(out)
}
