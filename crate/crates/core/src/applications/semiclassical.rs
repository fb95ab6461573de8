//! Rescaled density of the semiclassical quantization of a phase-space function.
//!
//! For `d = 1` and `γ_h ψ(x) = ∫∫ f(h(x+x′)/2, ξ) e^{i(x−x′)ξ} ψ(x′) dξ dx′`,
//! the density `ρ[Ψ(D)^{−s} γ_h(t/h) Ψ(D)^{−s}](x/h)` is the double integral
//!
//! `∫∫ e^{−i(t/2h)(φ(hξ−ξ′) − φ(ξ′))} Ψ(hξ−ξ′)^{−s} Ψ(ξ′)^{−s} 𝓕_x[f(·, hξ/2 − ξ′)](ξ) e^{ixξ} dξ dξ′`.
//!
//! We substitute `ξ′ = η + hξ/2`, so the velocity argument is `−η` on a fixed box,
//! and divide by `2π`. As `h → 0` the result tends to the velocity average at
//! time `t/2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::kinetic::PhaseSpaceFunction;
use crate::dispersion::DispersionRelation;
use crate::error::{LabError, Result};
use crate::onstrichartz::Psi;
use crate::oscillatory::rules::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalOptions {
    /// `𝓕_x f(·, v)` is treated as zero for `|ξ| > band`.
    pub band: f64,
    /// Trapezoid nodes on `[−band, band]`.
    pub xi_nodes: usize,
    /// Gauss panels over the velocity box, 16 nodes each.
    pub eta_panels: usize,
    /// Gauss panels over the position box, 16 nodes each.
    pub y_panels: usize,
}

impl Default for SemiclassicalOptions {
    fn default() -> Self {
        Self { band: 12.0, xi_nodes: 385, eta_panels: 8, y_panels: 24 }
    }
}

fn panel_rule(lo: f64, hi: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let (z, w) = gauss_legendre(16);
    let step = (hi - lo) / panels as f64;
    let mut nodes = Vec::with_capacity(16 * panels);
    let mut weights = Vec::with_capacity(16 * panels);
    for p in 0..panels {
        let a = lo + step * p as f64;
        for (zi, wi) in z.iter().zip(&w) {
            nodes.push(a + 0.5 * step * (1.0 + zi));
            weights.push(0.5 * step * wi);
        }
    }
    (nodes, weights)
}

fn max_over(lo: f64, hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    (0..=256).map(|i| g(lo + (hi - lo) * i as f64 / 256.0).abs()).fold(0.0, f64::max)
}

/// `(2π)^{−1}ρ[Ψ(D)^{−s}γ_h(t/h)Ψ(D)^{−s}](x/h)` by tensor quadrature.
#[allow(clippy::too_many_arguments)]
pub fn semiclassical_density(
    f: &PhaseSpaceFunction,
    phi: &DispersionRelation,
    s: f64,
    psi: Psi,
    h: f64,
    t: f64,
    x: f64,
    opts: SemiclassicalOptions,
) -> Result<f64> {
    if f.dim() != 1 {
        return Err(LabError::InvalidInput("the semiclassical density is implemented for d = 1".into()));
    }
    if !(h > 0.0 && h <= 1.0) {
        return Err(LabError::InvalidInput(format!("h = {h} must lie in (0, 1]")));
    }
    if !(opts.band > 0.0) || opts.xi_nodes < 3 || opts.eta_panels == 0 || opts.y_panels == 0 {
        return Err(LabError::InvalidInput("bad semiclassical quadrature options".into()));
    }
    let (v0, v1) = f.xi_box[0];
    let (y0, y1) = f.x_box[0];
    let band = opts.band;
    let dxi = 2.0 * band / (opts.xi_nodes - 1) as f64;
    let reach = h * band / 2.0 + v0.abs().max(v1.abs());
    // the ξ-integrand oscillates at rate |x − y| + (t/2)|φ′|; the trapezoid must not alias it
    let rate = x.abs() + y0.abs().max(y1.abs()) + 0.5 * t.abs() * max_over(0.0, reach, |r| phi.d1(r));
    if rate * dxi > PI {
        return Err(LabError::Numerical(format!(
            "ξ step {dxi:.3e} cannot resolve the phase rate {rate:.3e}; raise xi_nodes"
        )));
    }
    let eta_step = (v1 - v0) / opts.eta_panels as f64;
    let curvature = 0.5 * t.abs() * band * max_over(0.0, reach, |r| phi.d2(r));
    if curvature * eta_step > 12.0 {
        return Err(LabError::Numerical(format!(
            "velocity panels of width {eta_step:.3e} cannot resolve the phase; raise eta_panels"
        )));
    }
    if band * (y1 - y0) / opts.y_panels as f64 > 12.0 {
        return Err(LabError::Numerical("position panels too wide for the band; raise y_panels".into()));
    }

    let (eta, w_eta) = panel_rule(-v1, -v0, opts.eta_panels);
    let (ys, w_y) = panel_rule(y0, y1, opts.y_panels);
    let xis: Vec<f64> = (0..opts.xi_nodes).map(|i| -band + dxi * i as f64).collect();
    let psi_pow = psi.multiplier(-s);
    let weight = |r: f64| {
        if s == 0.0 {
            return 1.0;
        }
        let v = psi_pow.symbol(r);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };

    let samples: Vec<Vec<f64>> = eta.iter().map(|e| ys.iter().map(|y| f.eval(&[*y], &[-e])).collect()).collect();
    let columns: Vec<Complex64> = xis
        .par_iter()
        .enumerate()
        .map(|(k, &xi)| {
            let edge = if k == 0 || k + 1 == xis.len() { 0.5 } else { 1.0 };
            let rot: Vec<Complex64> = ys.iter().zip(&w_y).map(|(y, w)| Complex64::from_polar(*w, -y * xi)).collect();
            let mut inner = Complex64::new(0.0, 0.0);
            for ((e, we), row) in eta.iter().zip(&w_eta).zip(&samples) {
                let ft: Complex64 = row.iter().zip(&rot).map(|(v, c)| c * v).sum();
                if ft == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let a = (0.5 * h * xi - e).abs();
                let b = (0.5 * h * xi + e).abs();
                let phase = -(t / (2.0 * h)) * (phi.profile(a) - phi.profile(b));
                inner += ft * Complex64::from_polar(we * weight(a) * weight(b), phase);
            }
            inner * Complex64::from_polar(edge * dxi, x * xi)
        })
        .collect();
    let total: Complex64 = columns.iter().sum();
    Ok(total.re / (2.0 * PI))
}
