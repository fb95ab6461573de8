//! Decay-rate regression for the kernels.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernels::{EvalOptions, OscIntegralSpec, OscKind};
use crate::error::{LabError, Result};

/// Which `|x|` values enter the sup at each `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum XPolicy {
    Origin,
    /// `|x| ∈ {0, t/2, t, 2t}`.
    RayScan,
    /// `|x| = t|φ₀′(ρ)|` for the listed radii, plus `x = 0`: the rays on which
    /// the frequency `ρ` is stationary.
    Stationary { radii: Vec<f64> },
}

impl XPolicy {
    /// Stationary radii `ε·{1,2,4,8}`, which suit `ℐ⁻` where the support starts at `ε/2`.
    pub fn stationary_near_cutoff(eps: f64) -> Self {
        XPolicy::Stationary { radii: vec![eps, 2.0 * eps, 4.0 * eps, 8.0 * eps] }
    }
}

/// Least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(LabError::InvalidInput("line fit needs at least two paired points".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(LabError::Numerical("line fit input is not finite".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(LabError::InvalidInput("line fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    let intercept = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / n).sqrt();
    Ok(LineFit { slope, intercept, r_squared, rms })
}

/// `count` log-spaced points on `[a, b]`.
pub fn log_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..count).map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySample {
    pub kappa: f64,
    pub t: f64,
    pub x_norm: f64,
    /// `|κ·value|` for the κ-weighted kinds, `|value|` otherwise.
    pub magnitude: f64,
    pub error: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaFit {
    pub kappa: f64,
    pub fitted_sigma: f64,
    pub r_squared: f64,
    /// True when `r² < 0.9` and the log-residual exceeds `0.05`; a flat profile
    /// has a tiny `r²` but a well-determined slope.
    pub refused: bool,
    /// `sup_t t^σ·|value|` with `σ` the rate the estimate asserts.
    pub sup_scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFitReport {
    pub kind: OscKind,
    pub d: u32,
    pub epsilon: f64,
    pub gamma: f64,
    pub alpha: Option<f64>,
    pub x_policy: XPolicy,
    pub t_window: (f64, f64),
    pub expected_sigma: f64,
    pub per_kappa: Vec<KappaFit>,
    /// Smallest fitted slope over the κ list among unrefused fits.
    pub fitted_sigma: Option<f64>,
    pub r_squared: Option<f64>,
    /// Fitted `N` in `sup_t t^σ|value| ≈ C(1+|κ|)^N`, with its `r²`.
    pub kappa_growth: Option<LineFit>,
    pub samples: Vec<DecaySample>,
    /// Samples whose quadrature did not meet tolerance.
    pub unconverged: usize,
}

pub const MIN_T_SAMPLES: usize = 20;
pub const MIN_R_SQUARED: f64 = 0.9;
pub const FLAT_RMS: f64 = 0.05;

fn x_values(policy: &XPolicy, spec: &OscIntegralSpec, t: f64) -> Result<Vec<f64>> {
    Ok(match policy {
        XPolicy::Origin => vec![0.0],
        XPolicy::RayScan => vec![0.0, 0.5 * t, t, 2.0 * t],
        XPolicy::Stationary { radii } => {
            let radial = spec.radial()?;
            let mut xs = vec![0.0];
            for &r in radii {
                let slope = radial.phi_slope + (radial.dphi_rest)(r);
                xs.push(t * slope.abs());
            }
            xs
        }
    })
}

/// Per-κ fits and the κ-growth line from raw samples. Deterministic in the
/// sample list, so a report can be re-derived from its CSV.
pub fn regress_samples(
    samples: &[DecaySample],
    t_grid: &[f64],
    kappas: &[f64],
    expected: f64,
) -> (Vec<KappaFit>, Option<LineFit>) {
    let mut per_kappa = Vec::new();
    for &kappa in kappas {
        let sup: Vec<f64> = t_grid
            .iter()
            .map(|&t| {
                samples
                    .iter()
                    .filter(|s| s.kappa == kappa && s.t == t)
                    .map(|s| s.magnitude)
                    .fold(0.0, f64::max)
            })
            .collect();
        let sup_scaled = t_grid.iter().zip(&sup).map(|(t, m)| t.powf(expected) * m).fold(0.0, f64::max);
        let lx: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
        let ly: Vec<f64> = sup.iter().map(|m| m.ln()).collect();
        let (fitted_sigma, r_squared, refused) = match fit_line(&lx, &ly) {
            Ok(f) => (-f.slope, f.r_squared, f.r_squared < MIN_R_SQUARED && f.rms > FLAT_RMS),
            Err(_) => (f64::NAN, 0.0, true),
        };
        per_kappa.push(KappaFit { kappa, fitted_sigma, r_squared, refused, sup_scaled });
    }
    let growth_pts: Vec<(f64, f64)> = per_kappa
        .iter()
        .filter(|f| f.sup_scaled > 0.0)
        .map(|f| ((1.0 + f.kappa.abs()).ln(), f.sup_scaled.ln()))
        .collect();
    let kappa_growth = if growth_pts.len() >= 2 {
        let (gx, gy): (Vec<f64>, Vec<f64>) = growth_pts.into_iter().unzip();
        fit_line(&gx, &gy).ok()
    } else {
        None
    };
    (per_kappa, kappa_growth)
}

/// Evaluates the kernel over `t_grid × kappas × x_policy`, takes the sup over `x`
/// at each `(κ, t)` and regresses `log sup` on `log t`.
pub fn fit_decay(
    spec: &OscIntegralSpec,
    x_policy: &XPolicy,
    t_grid: &[f64],
    kappas: &[f64],
    opts: EvalOptions,
) -> Result<DecayFitReport> {
    spec.validate()?;
    if t_grid.len() < MIN_T_SAMPLES {
        return Err(LabError::InvalidInput(format!("need at least {MIN_T_SAMPLES} t samples, got {}", t_grid.len())));
    }
    if t_grid.iter().any(|&t| !(t >= 1.0)) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::InvalidInput("t grid must be increasing with t_min >= 1".into()));
    }
    if kappas.is_empty() {
        return Err(LabError::InvalidInput("kappa list is empty".into()));
    }

    let mut jobs = Vec::new();
    for &k in kappas {
        for &t in t_grid {
            for x in x_values(x_policy, spec, t)? {
                jobs.push((k, t, x));
            }
        }
    }
    let samples: Vec<DecaySample> = jobs
        .par_iter()
        .map(|&(kappa, t, x_norm)| {
            let s = OscIntegralSpec { kappa, ..spec.clone() };
            let radial = s.radial()?;
            let v = radial.eval(x_norm, t, opts);
            let scale = if spec.kind.kappa_weighted() { kappa.abs() } else { 1.0 };
            Ok(DecaySample {
                kappa,
                t,
                x_norm,
                magnitude: scale * v.value.norm(),
                error: scale * v.error,
                converged: v.converged,
            })
        })
        .collect::<Result<_>>()?;

    let expected = spec.kind.expected_rate(spec.d);
    let (per_kappa, kappa_growth) = regress_samples(&samples, t_grid, kappas, expected);
    let trusted: Vec<&KappaFit> = per_kappa.iter().filter(|f| !f.refused).collect();
    let worst = trusted.iter().min_by(|a, b| a.fitted_sigma.partial_cmp(&b.fitted_sigma).unwrap());
    let (fitted_sigma, r_squared) = (worst.map(|f| f.fitted_sigma), worst.map(|f| f.r_squared));
    let unconverged = samples.iter().filter(|s| !s.converged).count();
    Ok(DecayFitReport {
        kind: spec.kind,
        d: spec.d,
        epsilon: spec.epsilon,
        gamma: spec.gamma,
        alpha: spec.phi.as_ref().map(|p| p.alpha),
        x_policy: x_policy.clone(),
        t_window: (t_grid[0], *t_grid.last().unwrap()),
        expected_sigma: expected,
        fitted_sigma,
        r_squared,
        per_kappa,
        kappa_growth,
        samples,
        unconverged,
    })
}
