//! Decay sweeps of the weighted oscillatory kernels.

use dispersive_lab::dispersion::{AlmostHomogeneousSymbol, PowerTerm};
use dispersive_lab::oscillatory::{fit_decay, log_grid, regress_samples, DecaySample, EvalOptions, OscIntegralSpec, OscKind, XPolicy};
use serde::{Deserialize, Serialize};

use crate::config::{Config, Kind};
use crate::error::{CliError, CliResult};
use crate::table::Table;
use crate::{Check, Derived, Outcome};

pub const HEADER: &[&str] = &["kappa", "t", "x_norm", "magnitude", "error", "converged"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub kernel: OscKind,
    pub d: u32,
    pub kappas: Vec<f64>,
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub gamma: f64,
    /// Order of a homogeneous symbol `|ξ|^α` for the almost-homogeneous kinds.
    pub alpha: Option<f64>,
    /// Power-sum symbol; overrides `alpha`.
    pub symbol: Option<AlmostHomogeneousSymbol>,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    pub x_policy: XPolicy,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
}

fn default_rtol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tols {
    /// Defaults to the rate the estimate asserts.
    pub sigma_target: Option<f64>,
    #[serde(default = "default_sigma_tol")]
    pub sigma_tol: f64,
    pub min_kappa_growth_r2: Option<f64>,
}

fn default_sigma_tol() -> f64 {
    0.1
}

fn spec(p: &Params) -> CliResult<OscIntegralSpec> {
    let mut spec = OscIntegralSpec::new(p.kernel, p.d, 0.0).with_gamma(p.gamma);
    if let Some(eps) = p.epsilon {
        spec = spec.with_epsilon(eps);
    }
    let symbol = match (&p.symbol, p.alpha) {
        (Some(s), _) => Some(AlmostHomogeneousSymbol::new(s.alpha, s.terms.clone())?),
        (None, Some(a)) => Some(AlmostHomogeneousSymbol::new(a, vec![PowerTerm { coef: 1.0, power: a }])?),
        (None, None) => None,
    };
    if let Some(s) = symbol {
        spec = spec.with_symbol(s);
    }
    spec.validate()?;
    Ok(spec)
}

fn check_params(p: &Params) -> CliResult<()> {
    if p.kappas.is_empty() || p.kappas.iter().any(|k| !k.is_finite()) {
        return Err(CliError::parse("kappas must be a nonempty list of finite numbers"));
    }
    if !(p.t_min >= 1.0 && p.t_max > p.t_min && p.t_max.is_finite()) {
        return Err(CliError::parse("need 1 <= t_min < t_max"));
    }
    if !(p.rtol > 0.0 && p.rtol < 1.0) {
        return Err(CliError::parse("rtol must lie in (0, 1)"));
    }
    Ok(())
}

pub fn run(cfg: &Config) -> CliResult<Outcome> {
    let params: Params = cfg.params()?;
    let tols: Tols = cfg.tols()?;
    check_params(&params)?;
    let spec = spec(&params)?;
    let t_grid = log_grid(params.t_min, params.t_max, params.t_count);
    let opts = EvalOptions { rtol: params.rtol, ..EvalOptions::default() };
    let mut report = fit_decay(&spec, &params.x_policy, &t_grid, &params.kappas, opts)?;

    let mut table = Table::new(HEADER);
    for s in &report.samples {
        table.push_nums(&[s.kappa, s.t, s.x_norm, s.magnitude, s.error, if s.converged { 1.0 } else { 0.0 }]);
    }
    let target = tols.sigma_target.unwrap_or(report.expected_sigma);
    let mut checks = vec![Check::within("fitted_sigma", report.fitted_sigma.unwrap_or(f64::NAN), target, tols.sigma_tol)];
    if let Some(min_r2) = tols.min_kappa_growth_r2 {
        let r2 = report.kappa_growth.map(|g| g.r_squared).unwrap_or(f64::NAN);
        checks.push(Check::at_least("kappa_growth_r2", r2, min_r2));
    }
    report.samples.clear();
    let claim = format!("{} kernel decays like t^-σ uniformly in x with polynomial growth in κ", spec.kind.label());
    super::finish(Kind::Oscdecay, &claim, &params, &tols, table, super::to_json(&report), checks)
}

/// Refits from the CSV rows: per-κ slope, `r²` and scaled sup, the κ-growth line and the reported `σ`.
pub fn derive(p: &Params, table: &Table) -> CliResult<Derived> {
    let cols: Vec<Vec<f64>> = HEADER.iter().map(|h| table.nums(h)).collect::<CliResult<_>>()?;
    let samples: Vec<DecaySample> = (0..table.rows.len())
        .map(|i| DecaySample {
            kappa: cols[0][i],
            t: cols[1][i],
            x_norm: cols[2][i],
            magnitude: cols[3][i],
            error: cols[4][i],
            converged: cols[5][i] != 0.0,
        })
        .collect();
    let mut t_grid: Vec<f64> = cols[1].clone();
    t_grid.sort_by(f64::total_cmp);
    t_grid.dedup();
    let expected = p.kernel.expected_rate(p.d);
    let (fits, growth) = regress_samples(&samples, &t_grid, &p.kappas, expected);
    let mut out = Derived::new();
    for f in &fits {
        out.insert(format!("sigma@kappa={}", f.kappa), f.fitted_sigma);
        out.insert(format!("r2@kappa={}", f.kappa), f.r_squared);
        out.insert(format!("sup_scaled@kappa={}", f.kappa), f.sup_scaled);
    }
    let fitted = fits.iter().filter(|f| !f.refused).map(|f| f.fitted_sigma).fold(f64::NAN, f64::min);
    out.insert("fitted_sigma".into(), fitted);
    if let Some(g) = growth {
        out.insert("kappa_growth_slope".into(), g.slope);
        out.insert("kappa_growth_r2".into(), g.r_squared);
    }
    Ok(out)
}
