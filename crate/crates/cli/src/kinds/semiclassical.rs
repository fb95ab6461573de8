//! Convergence of the rescaled semiclassical density to the velocity average.

use dispersive_lab::applications::{semiclassical_density, velocity_average, SemiclassicalOptions, VelocityOptions};
use dispersive_lab::dispersion::DispersionRelation;
use dispersive_lab::onstrichartz::Psi;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kinetic::Datum;
use crate::config::{Config, Kind};
use crate::error::{CliError, CliResult};
use crate::table::Table;
use crate::{Check, Derived, Outcome};

pub const HEADER: &[&str] = &["h", "x", "density", "limit", "error"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub datum: Datum,
    pub phi: DispersionRelation,
    #[serde(default)]
    pub s: f64,
    #[serde(default = "homogeneous")]
    pub psi: Psi,
    pub t: f64,
    pub xs: Vec<f64>,
    /// Decreasing, ideally by halves.
    pub hs: Vec<f64>,
}

fn homogeneous() -> Psi {
    Psi::Homogeneous
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tols {
    /// Smallest allowed error ratio between consecutive `h`.
    #[serde(default = "min_ratio")]
    pub min_ratio: f64,
}

fn min_ratio() -> f64 {
    1.5
}

pub fn run(cfg: &Config) -> CliResult<Outcome> {
    let params: Params = cfg.params()?;
    let tols: Tols = cfg.tols()?;
    if params.xs.is_empty() || params.hs.len() < 2 || params.hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::parse("need at least one x and a decreasing list of at least two h"));
    }
    let f = params.datum.function();
    let mut table = Table::new(HEADER);
    for &x in &params.xs {
        let limit = velocity_average(&f, &params.phi, params.s, params.psi, params.t / 2.0, &[x], VelocityOptions::default())?;
        let dens: Vec<f64> = params
            .hs
            .par_iter()
            .map(|&h| semiclassical_density(&f, &params.phi, params.s, params.psi, h, params.t, x, SemiclassicalOptions::default()))
            .collect::<Result<_, _>>()?;
        for (h, v) in params.hs.iter().zip(dens) {
            table.push_nums(&[*h, x, v, limit, (v - limit).abs()]);
        }
    }
    let derived = derive(&table)?;
    let checks = vec![Check::at_least("min_halving_ratio", derived["min_halving_ratio"], tols.min_ratio)];
    super::finish(Kind::Semiclassical, "semiclassical density tends to the velocity average", &params, &tols, table, serde_json::Value::Null, checks)
}

/// Error ratios between consecutive rows at the same `x`.
pub fn derive(table: &Table) -> CliResult<Derived> {
    let x = table.nums("x")?;
    let err = table.nums("error")?;
    let mut out = Derived::new();
    let mut min_ratio = f64::INFINITY;
    for i in 1..x.len() {
        if x[i] == x[i - 1] {
            let ratio = err[i - 1] / err[i];
            out.insert(format!("ratio@x={},row={i}", x[i]), ratio);
            min_ratio = min_ratio.min(ratio);
        }
    }
    out.insert("min_halving_ratio".into(), min_ratio);
    out.insert("max_error".into(), err.iter().cloned().fold(0.0, f64::max));
    Ok(out)
}
