//! Growth sweeps over the two counterexample families.
//!
//! For `φ = |ξ|²` the lattice members satisfy
//! `|e^{itφ(D)} f_j(x)| = R^{−d/2} |e^{i(t/R²)φ(D)} G((x + 2t v_j)/R)|` with
//! `Ĝ(ζ) = cχ(2|ζ|)`, so the density at every `R` is a sum of translated copies of
//! one radial profile. The lattice sweep evaluates it that way, off the grid.
//! Time-translate members are `c e^{−ijφ(D)}g`, so every member's trajectory is a
//! time shift of the trajectory of `g`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{lattice_bump_constant, lattice_points, time_translate_grid, time_translate_profile};
use super::lhs::real_lp;
use crate::dispersion::DispersionRelation;
use crate::error::{LabError, Result};
use crate::norms::{sequence_norm, time_norm, MixedNormSpec};
use crate::oscillatory::bessel::sphere_ft_value;
use crate::oscillatory::bump::smooth_bump;
use crate::oscillatory::fit::{fit_line, LineFit};
use crate::oscillatory::rules::gauss_legendre;
use crate::spectral::Field;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "kebab-case")]
pub enum Construction {
    /// Scales are `R`; `φ = |ξ|²`; window `|t| ≤ R`.
    Lattice,
    /// Scales are `N`; window `[0, N + 1]`.
    TimeTranslates { ell: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scale: f64,
    pub members: usize,
    pub lhs: f64,
    /// `‖ν‖_{ℓ^β}`.
    pub rhs: f64,
    pub ratio: f64,
    /// `LHS^{q/2} / #members`.
    pub mass_per_member: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessSweep {
    pub construction: Construction,
    pub d: usize,
    pub q: f64,
    pub r: f64,
    pub beta: f64,
    pub phi: DispersionRelation,
    pub scales: Vec<f64>,
    pub rows: Vec<SweepRow>,
    pub lhs_fit: LineFit,
    pub rhs_fit: LineFit,
    pub ratio_fit: LineFit,
    /// `max/min` of the ratio over the scales.
    pub ratio_spread: f64,
    pub ratio_increasing: bool,
    /// `max/min` of `LHS^{q/2}/#members`.
    pub mass_spread: f64,
}

impl SharpnessSweep {
    fn assemble(
        construction: Construction,
        d: usize,
        q: f64,
        r: f64,
        beta: f64,
        phi: DispersionRelation,
        measured: Vec<(f64, usize, f64, Vec<f64>)>,
    ) -> Result<Self> {
        let rows: Vec<SweepRow> = measured
            .iter()
            .map(|(scale, members, lhs, nu)| {
                let rhs = sequence_norm(nu, beta);
                SweepRow {
                    scale: *scale,
                    members: *members,
                    lhs: *lhs,
                    rhs,
                    ratio: lhs / rhs,
                    mass_per_member: lhs.powf(q / 2.0) / *members as f64,
                }
            })
            .collect();
        let lx: Vec<f64> = rows.iter().map(|w| w.scale.ln()).collect();
        let ly = |f: fn(&SweepRow) -> f64| -> Vec<f64> { rows.iter().map(|w| f(w).ln()).collect() };
        let lhs_fit = fit_line(&lx, &ly(|w| w.lhs))?;
        let rhs_fit = fit_line(&lx, &ly(|w| w.rhs))?;
        let ratio_fit = fit_line(&lx, &ly(|w| w.ratio))?;
        let spread = |v: Vec<f64>| {
            let hi = v.iter().cloned().fold(f64::MIN, f64::max);
            let lo = v.iter().cloned().fold(f64::MAX, f64::min);
            hi / lo
        };
        let ratio_spread = spread(rows.iter().map(|w| w.ratio).collect());
        let mass_spread = spread(rows.iter().map(|w| w.mass_per_member).collect());
        let ratio_increasing = rows.windows(2).all(|w| w[1].ratio > w[0].ratio);
        Ok(Self {
            construction,
            d,
            q,
            r,
            beta,
            phi,
            scales: rows.iter().map(|w| w.scale).collect(),
            rows,
            lhs_fit,
            rhs_fit,
            ratio_fit,
            ratio_spread,
            ratio_increasing,
            mass_spread,
        })
    }

    /// The same measurements against another `β`; `LHS` does not depend on it.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        if !(beta >= 1.0) {
            return Err(LabError::InvalidInput(format!("beta = {beta} must be >= 1")));
        }
        let measured = self
            .rows
            .iter()
            .map(|w| (w.scale, w.members, w.lhs, vec![1.0; w.members]))
            .collect();
        Self::assemble(self.construction.clone(), self.d, self.q, self.r, beta, self.phi.clone(), measured)
    }
}

fn check_scales(scales: &[usize]) -> Result<()> {
    if scales.len() < 4 || scales.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::InvalidInput("need at least four increasing scales".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeEvalOptions {
    /// Samples of `t ∈ [0, R]`; the density is even in `t`.
    pub time_samples: usize,
    /// Spacing of the sampling grid in `y = x/R`.
    pub y_step: f64,
    /// Radius beyond which the profile `|U_G|²` is dropped.
    pub y_cut: f64,
}

impl Default for LatticeEvalOptions {
    fn default() -> Self {
        Self { time_samples: 17, y_step: 0.5, y_cut: 16.0 }
    }
}

/// `|e^{iτφ(D)}G(y)|²` tabulated on `|y| ∈ [0, y_cut]`.
struct GalileanProfile {
    step: f64,
    /// Per radius, the quadrature weights against `e^{iτρ_k²}`.
    rows: Vec<Vec<f64>>,
    nodes_sq: Vec<f64>,
}

impl GalileanProfile {
    fn new(d: usize, y_cut: f64) -> Self {
        let c = lattice_bump_constant(d);
        let (gx, gw) = gauss_legendre(32);
        // [0, 1/4] where χ(2ρ) = 1, then the transition in four panels
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut panels = vec![(0.0, 0.25)];
        for p in 0..4 {
            panels.push((0.25 + 0.0625 * p as f64, 0.25 + 0.0625 * (p + 1) as f64));
        }
        for (a, b) in panels {
            for (x, w) in gx.iter().zip(&gw) {
                let rho = a + 0.5 * (b - a) * (x + 1.0);
                nodes.push(rho);
                weights.push(0.5 * (b - a) * w * c * smooth_bump(2.0 * rho) * rho.powi(d as i32 - 1));
            }
        }
        let step = 1.0 / 64.0;
        let count = (y_cut / step).ceil() as usize + 2;
        let norm = (2.0 * PI).powi(-(d as i32));
        let rows = (0..count)
            .map(|m| {
                let y = m as f64 * step;
                nodes
                    .iter()
                    .zip(&weights)
                    .map(|(rho, w)| norm * w * sphere_ft_value(d as u32, rho * y))
                    .collect()
            })
            .collect();
        Self { step, rows, nodes_sq: nodes.iter().map(|r| r * r).collect() }
    }

    fn table(&self, tau: f64) -> Vec<f64> {
        let phases: Vec<Complex64> = self.nodes_sq.iter().map(|r2| Complex64::from_polar(1.0, tau * r2)).collect();
        self.rows
            .iter()
            .map(|row| row.iter().zip(&phases).map(|(w, p)| p * *w).sum::<Complex64>().norm_sqr())
            .collect()
    }
}

fn interp(table: &[f64], step: f64, s: f64) -> f64 {
    let u = s / step;
    let i = u.floor() as usize;
    if i + 1 >= table.len() {
        return 0.0;
    }
    let w = u - i as f64;
    table[i] * (1.0 - w) + table[i + 1] * w
}

/// Density of the lattice family at `t = τR` on the `y = x/R` grid, times `R^d`.
fn lattice_density(pts: &[[f64; 3]], d: usize, tau: f64, table: &[f64], table_step: f64, opts: &LatticeEvalOptions) -> Vec<f64> {
    let half = 4.0 * tau.abs() + opts.y_cut;
    let m = (half / opts.y_step).ceil() as i64;
    let side = (2 * m + 1) as usize;
    let mut rho = vec![0.0; side.pow(d as u32)];
    let reach = (opts.y_cut / opts.y_step).ceil() as i64;
    for v in pts {
        // centre of member j at y = −2τ v_j
        let c: Vec<f64> = (0..d).map(|a| -2.0 * tau * v[a]).collect();
        let ci: Vec<i64> = c.iter().map(|x| (x / opts.y_step).round() as i64).collect();
        match d {
            1 => {
                for i in (ci[0] - reach).max(-m)..=(ci[0] + reach).min(m) {
                    let s = (i as f64 * opts.y_step - c[0]).abs();
                    rho[(i + m) as usize] += interp(table, table_step, s);
                }
            }
            _ => {
                for i in (ci[0] - reach).max(-m)..=(ci[0] + reach).min(m) {
                    let dy0 = i as f64 * opts.y_step - c[0];
                    let row = (i + m) as usize * side;
                    for k in (ci[1] - reach).max(-m)..=(ci[1] + reach).min(m) {
                        let dy1 = k as f64 * opts.y_step - c[1];
                        let s = (dy0 * dy0 + dy1 * dy1).sqrt();
                        if s < opts.y_cut {
                            rho[row + (k + m) as usize] += interp(table, table_step, s);
                        }
                    }
                }
            }
        }
    }
    rho
}

fn lattice_profile_norms(scale: usize, d: usize, r: f64, taus: &[f64], prof: &GalileanProfile, opts: &LatticeEvalOptions) -> Vec<f64> {
    let pts = lattice_points(scale, d);
    let rr = scale as f64;
    taus.par_iter()
        .map(|&tau| {
            let table = prof.table(tau / rr);
            let rho_scaled = lattice_density(&pts, d, tau, &table, prof.step, opts);
            // ρ = R^{−d}·rho_scaled and dx = R^d dy
            let norm_y = real_lp(&rho_scaled, opts.y_step.powi(d as i32), r / 2.0);
            let dx_factor = if r.is_infinite() { 1.0 } else { rr.powf(2.0 * d as f64 / r) };
            rr.powi(-(d as i32)) * norm_y * dx_factor
        })
        .collect()
}

/// `‖Σ_j |e^{it|D|²} f_j|²‖_{L^{r/2}_x}` for the lattice family at `t = τR`.
pub fn lattice_density_norm(scale: usize, d: usize, r: f64, tau: f64, opts: LatticeEvalOptions) -> Result<f64> {
    if !(1..=2).contains(&d) || scale < 2 || !(r >= 2.0) {
        return Err(LabError::InvalidInput("bad lattice evaluation parameters".into()));
    }
    let prof = GalileanProfile::new(d, opts.y_cut);
    Ok(lattice_profile_norms(scale, d, r, &[tau], &prof, &opts)[0])
}

/// `‖Σ_j |e^{it|D|²} f_j|²‖_{L^{q/2}_t L^{r/2}_x}` over `|t| ≤ R` for the lattice family,
/// with the time samples doubled until the value moves by less than 1%.
pub fn lattice_lhs(scale: usize, d: usize, q: f64, r: f64, opts: LatticeEvalOptions) -> Result<f64> {
    if !(1..=2).contains(&d) {
        return Err(LabError::InvalidInput("lattice evaluation supports d = 1, 2".into()));
    }
    if scale < 2 || !(q >= 2.0 && r >= 2.0) || opts.time_samples < 2 || !(opts.y_step > 0.0) || !(opts.y_cut > 0.0) {
        return Err(LabError::InvalidInput("bad lattice evaluation parameters".into()));
    }
    let prof = GalileanProfile::new(d, opts.y_cut);
    let spec = MixedNormSpec::new(q / 2.0, r / 2.0);
    let rr = scale as f64;
    let mut n = opts.time_samples;
    let value_at = |taus: &[f64], profile: &[f64]| -> Result<f64> {
        let times: Vec<f64> = taus.iter().map(|t| t * rr).collect();
        let half = time_norm(profile, &times, &spec)?;
        // even in t: the window [−R, R] doubles the L^{q/2} integral
        Ok(if q.is_infinite() { half } else { half * 2f64.powf(2.0 / q) })
    };
    let mut taus: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let mut profile = lattice_profile_norms(scale, d, r, &taus, &prof, &opts);
    let mut value = value_at(&taus, &profile)?;
    loop {
        let fine_n = 2 * n - 1;
        if fine_n > 1025 {
            return Err(LabError::Numerical("lattice time window unresolved".into()));
        }
        let mids: Vec<f64> = (0..n - 1).map(|i| (i as f64 + 0.5) / (n - 1) as f64).collect();
        let mid_profile = lattice_profile_norms(scale, d, r, &mids, &prof, &opts);
        let mut t2 = Vec::with_capacity(fine_n);
        let mut p2 = Vec::with_capacity(fine_n);
        for i in 0..n {
            t2.push(taus[i]);
            p2.push(profile[i]);
            if i + 1 < n {
                t2.push(mids[i]);
                p2.push(mid_profile[i]);
            }
        }
        let fine = value_at(&t2, &p2)?;
        let change = (fine - value).abs() / fine;
        taus = t2;
        profile = p2;
        value = fine;
        n = fine_n;
        if change < 0.01 {
            return Ok(value);
        }
    }
}

/// Lattice sweep at `φ = |ξ|²`, `ν ≡ 1`.
pub fn sharpness_sweep_lattice(d: usize, q: f64, r: f64, beta: f64, scales: &[usize], opts: LatticeEvalOptions) -> Result<SharpnessSweep> {
    check_scales(scales)?;
    if !(beta >= 1.0) {
        return Err(LabError::InvalidInput(format!("beta = {beta} must be >= 1")));
    }
    let mut measured = Vec::new();
    for &scale in scales {
        let lhs = lattice_lhs(scale, d, q, r, opts)?;
        let count = lattice_points(scale, d).len();
        measured.push((scale as f64, count, lhs, vec![1.0; count]));
    }
    SharpnessSweep::assemble(Construction::Lattice, d, q, r, beta, DispersionRelation::schrodinger(), measured)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeTranslateOptions {
    /// Grid size; the box is fitted to the shell.
    pub n: usize,
    /// Coarse step over `[0, N + 1]`.
    pub coarse_step: f64,
    /// Width of the finely sampled interval `[m, m + ε]` after each integer.
    pub epsilon: f64,
    /// Fine samples per `[m, m + ε]`.
    pub fine_per_epsilon: usize,
}

impl Default for TimeTranslateOptions {
    fn default() -> Self {
        Self { n: 8192, coarse_step: 0.1, epsilon: 0.1, fine_per_epsilon: 8 }
    }
}

/// Sample ticks: every `coarse` ticks over `[0, (count+1)·per_int]`, plus every
/// tick on `[m·per_int, m·per_int + eps]` for `m = 1..=count`.
fn translate_ticks(count: usize, per_int: i64, coarse: i64, eps: i64) -> Vec<i64> {
    let end = (count as i64 + 1) * per_int;
    let mut t: Vec<i64> = (0..=end / coarse).map(|k| k * coarse).collect();
    for m in 1..=count as i64 {
        t.extend((0..=eps).map(|k| m * per_int + k));
    }
    t.sort_unstable();
    t.dedup();
    t
}

/// LHS for the time-translate family with coefficients `nu` (length `count`),
/// window `[0, count + 1]`, sampled coarsely plus finely on `[m, m + ε]`.
/// Both samplings are doubled until the value moves by less than 1%.
pub fn time_translate_lhs(
    count: usize,
    phi: &DispersionRelation,
    ell: i64,
    q: f64,
    r: f64,
    nu: &[f64],
    opts: TimeTranslateOptions,
) -> Result<f64> {
    if nu.len() != count || count == 0 {
        return Err(LabError::InvalidInput("coefficients must match the member count".into()));
    }
    if !(q >= 2.0 && r >= 2.0) {
        return Err(LabError::InvalidInput("q and r must be >= 2".into()));
    }
    let k = (1.0 / opts.coarse_step).round() as i64;
    let e = (opts.epsilon / opts.coarse_step).round() as i64;
    let f = opts.fine_per_epsilon as i64;
    if k < 1
        || (1.0 / opts.coarse_step - k as f64).abs() > 1e-9
        || e < 1
        || (opts.epsilon / opts.coarse_step - e as f64).abs() > 1e-9
        || f == 0
        || f % e != 0
    {
        return Err(LabError::InvalidInput(
            "need coarse step 1/k, epsilon a multiple e of it, and e dividing the fine count".into(),
        ));
    }
    let grid = time_translate_grid(opts.n, phi, ell)?;
    let g = time_translate_profile(phi, ell, grid)?;
    let spec = MixedNormSpec::new(q / 2.0, r / 2.0);
    let mut prev: Option<f64> = None;
    for level in 0..5 {
        // one tick is ε/(F·2^level): fine points every tick, coarse points every F/e ticks
        let eps_ticks = f << level;
        let per_int = k * eps_ticks / e;
        let unit = 1.0 / per_int as f64;
        let ticks = translate_ticks(count, per_int, f / e, eps_ticks);
        let value = evaluate_translates(&g, phi, nu, &ticks, per_int, unit, &spec, r)?;
        if let Some(p) = prev {
            if (value - p).abs() / value < 0.01 {
                return Ok(value);
            }
        }
        prev = Some(value);
    }
    Err(LabError::Numerical("time-translate window unresolved".into()))
}

#[allow(clippy::too_many_arguments)]
fn evaluate_translates(
    g: &Field,
    phi: &DispersionRelation,
    nu: &[f64],
    ticks: &[i64],
    ticks_per_int: i64,
    unit: f64,
    spec: &MixedNormSpec,
    r: f64,
) -> Result<f64> {
    let grid = g.grid;
    let phases: Vec<f64> = (0..grid.len()).map(|i| phi.profile(grid.frequency_norm(i))).collect();
    let mut cache: HashMap<i64, Vec<f64>> = HashMap::new();
    let mut slice = |s: i64| -> Vec<f64> {
        cache
            .entry(s)
            .or_insert_with(|| {
                let t = s as f64 * unit;
                let spec: Vec<Complex64> =
                    g.spectrum().iter().zip(&phases).map(|(a, p)| a * Complex64::from_polar(1.0, t * p)).collect();
                let u = Field::from_spectrum(grid, spec).expect("grid-sized spectrum");
                u.values.iter().map(|v| v.norm_sqr()).collect()
            })
            .clone()
    };
    let cell = grid.cell_volume();
    let mut profile = Vec::with_capacity(ticks.len());
    for &t in ticks {
        let mut rho = vec![0.0; grid.len()];
        for (j, &c) in nu.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let u = slice(t - (j as i64 + 1) * ticks_per_int);
            for (a, b) in rho.iter_mut().zip(&u) {
                *a += c * b;
            }
        }
        profile.push(real_lp(&rho, cell, r / 2.0));
    }
    let times: Vec<f64> = ticks.iter().map(|&t| t as f64 * unit).collect();
    time_norm(&profile, &times, spec)
}

/// Time-translate sweep with `ν ≡ 1`.
pub fn sharpness_sweep_time_translates(
    phi: &DispersionRelation,
    ell: i64,
    q: f64,
    r: f64,
    beta: f64,
    scales: &[usize],
    opts: TimeTranslateOptions,
) -> Result<SharpnessSweep> {
    check_scales(scales)?;
    if !(beta >= 1.0) {
        return Err(LabError::InvalidInput(format!("beta = {beta} must be >= 1")));
    }
    let mut measured = Vec::new();
    for &count in scales {
        let nu = vec![1.0; count];
        let lhs = time_translate_lhs(count, phi, ell, q, r, &nu, opts)?;
        measured.push((count as f64, count, lhs, nu));
    }
    SharpnessSweep::assemble(Construction::TimeTranslates { ell }, 1, q, r, beta, phi.clone(), measured)
}
