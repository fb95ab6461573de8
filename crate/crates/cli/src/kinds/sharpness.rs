//! Growth of both sides of the orthonormal Strichartz bound along the
//! counterexample families.

use dispersive_lab::dispersion::DispersionRelation;
use dispersive_lab::exponents::{beta_sigma, sigma, Exponent};
use dispersive_lab::onstrichartz::{
    sharpness_sweep_lattice, sharpness_sweep_time_translates, LatticeEvalOptions, SharpnessSweep, TimeTranslateOptions,
};
use dispersive_lab::oscillatory::fit_line;
use serde::{Deserialize, Serialize};

use crate::config::{Config, Kind};
use crate::error::{CliError, CliResult};
use crate::table::Table;
use crate::{Check, Derived, Outcome};

pub const HEADER: &[&str] = &["scale", "members", "lhs", "rhs", "ratio", "mass_per_member"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionName {
    Lattice,
    TimeTranslates,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub construction: ConstructionName,
    #[serde(default = "one")]
    pub d: usize,
    /// Exponents as strings, e.g. `"4"` or `"inf"`.
    pub q: String,
    pub r: String,
    /// Defaults to `β_{d/2}(q, r)`.
    pub beta: Option<f64>,
    /// The ratio must increase strictly at `beta_factor·β`.
    #[serde(default = "default_factor")]
    pub beta_factor: f64,
    pub scales: Vec<usize>,
    /// Shell index of the time-translate profile.
    #[serde(default)]
    pub ell: i64,
    pub lattice: Option<LatticeEvalOptions>,
    pub translates: Option<TimeTranslateOptions>,
}

fn one() -> usize {
    1
}

fn default_factor() -> f64 {
    1.2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tols {
    #[serde(default = "lhs_tol")]
    pub lhs_slope_tol: f64,
    #[serde(default = "rhs_tol")]
    pub rhs_slope_tol: f64,
    #[serde(default = "ratio_spread")]
    pub max_ratio_spread: f64,
    #[serde(default = "mass_spread")]
    pub max_mass_spread: f64,
}

fn lhs_tol() -> f64 {
    0.1
}
fn rhs_tol() -> f64 {
    0.05
}
fn ratio_spread() -> f64 {
    2.5
}
fn mass_spread() -> f64 {
    3.0
}

struct Resolved {
    q: f64,
    r: f64,
    beta: f64,
}

fn resolve(p: &Params) -> CliResult<Resolved> {
    if p.d == 0 || p.d > 3 {
        return Err(CliError::parse(format!("d = {} must be 1, 2 or 3", p.d)));
    }
    if p.construction == ConstructionName::TimeTranslates && p.d != 1 {
        return Err(CliError::parse("the time-translate construction is one-dimensional"));
    }
    if !(p.beta_factor > 1.0) {
        return Err(CliError::parse("beta_factor must exceed 1"));
    }
    let (q, r) = (Exponent::parse(&p.q)?, Exponent::parse(&p.r)?);
    let beta = match p.beta {
        Some(b) => b,
        None => beta_sigma(q, r, sigma::schrodinger(p.d as u32))?.to_f64(),
    };
    if !(beta >= 1.0 && beta.is_finite()) {
        return Err(CliError::parse(format!("beta = {beta} must be finite and >= 1")));
    }
    Ok(Resolved { q: q.to_f64(), r: r.to_f64(), beta })
}

pub fn run(cfg: &Config) -> CliResult<Outcome> {
    let params: Params = cfg.params()?;
    let tols: Tols = cfg.tols()?;
    let res = resolve(&params)?;
    let sweep: SharpnessSweep = match params.construction {
        ConstructionName::Lattice => sharpness_sweep_lattice(
            params.d,
            res.q,
            res.r,
            res.beta,
            &params.scales,
            params.lattice.unwrap_or_default(),
        )?,
        ConstructionName::TimeTranslates => sharpness_sweep_time_translates(
            &DispersionRelation::schrodinger(),
            params.ell,
            res.q,
            res.r,
            res.beta,
            &params.scales,
            params.translates.unwrap_or_default(),
        )?,
    };
    let mut table = Table::new(HEADER);
    for w in &sweep.rows {
        table.push_nums(&[w.scale, w.members as f64, w.lhs, w.rhs, w.ratio, w.mass_per_member]);
    }
    let derived = derive(&params, &table)?;
    let get = |k: &str| derived.get(k).copied().unwrap_or(f64::NAN);
    let d = params.d as f64;
    let (checks, claim) = match params.construction {
        ConstructionName::Lattice => (
            vec![
                Check::within("lhs_slope", get("lhs_slope"), 2.0 / res.q + 2.0 * d / res.r, tols.lhs_slope_tol),
                Check::within("rhs_slope", get("rhs_slope"), d / res.beta, tols.rhs_slope_tol),
                Check::at_most("ratio_spread", get("ratio_spread"), tols.max_ratio_spread),
                Check::new("ratio_increasing_at_larger_beta", get("ratio_increasing_at_larger_beta"), "== 1".into(), get("ratio_increasing_at_larger_beta") == 1.0),
            ],
            "lattice family: the summability exponent β cannot be raised",
        ),
        ConstructionName::TimeTranslates => (
            vec![Check::at_most("mass_spread", get("mass_spread"), tols.max_mass_spread)],
            "time-translate family: LHS^{q/2} grows linearly in the number of members",
        ),
    };
    super::finish(Kind::Sharpness, claim, &params, &tols, table, super::to_json(&sweep), checks)
}

pub fn derive(p: &Params, table: &Table) -> CliResult<Derived> {
    let res = resolve(p)?;
    let scale = table.nums("scale")?;
    let members = table.nums("members")?;
    let lhs = table.nums("lhs")?;
    let rhs = table.nums("rhs")?;
    let ratio = table.nums("ratio")?;
    let mass = table.nums("mass_per_member")?;
    let ln = |v: &[f64]| v.iter().map(|x| x.ln()).collect::<Vec<f64>>();
    let lx = ln(&scale);
    let mut out = Derived::new();
    let fit = |y: &[f64]| fit_line(&lx, &ln(y)).map(|f| f.slope).unwrap_or(f64::NAN);
    out.insert("lhs_slope".into(), fit(&lhs));
    out.insert("rhs_slope".into(), fit(&rhs));
    out.insert("ratio_slope".into(), fit(&ratio));
    out.insert("ratio_spread".into(), super::spread(&ratio));
    out.insert("mass_spread".into(), super::spread(&mass));
    let beta_hi = p.beta_factor * res.beta;
    let hi: Vec<f64> = lhs.iter().zip(&members).map(|(l, m)| l / m.powf(1.0 / beta_hi)).collect();
    let increasing = hi.windows(2).all(|w| w[1] > w[0]);
    out.insert("ratio_increasing_at_larger_beta".into(), if increasing { 1.0 } else { 0.0 });
    Ok(out)
}
