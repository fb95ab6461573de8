//! Velocity averages `ϱf(t, x) = ∫ f(x − t∇φ(ξ), ξ) Ψ(ξ)^{−2s} dξ`.

use std::fmt;
use std::sync::Arc;

use crate::dispersion::DispersionRelation;
use crate::error::{LabError, Result};
use crate::onstrichartz::Psi;
use crate::oscillatory::rules::gauss_legendre;

pub type Sampler = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// `f(x, ξ)` with declared support boxes; evaluates to zero outside them.
#[derive(Clone)]
pub struct PhaseSpaceFunction {
    sampler: Sampler,
    pub x_box: Vec<(f64, f64)>,
    pub xi_box: Vec<(f64, f64)>,
}

impl fmt::Debug for PhaseSpaceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhaseSpaceFunction").field("x_box", &self.x_box).field("xi_box", &self.xi_box).finish()
    }
}

fn check_box(b: &[(f64, f64)], what: &str) -> Result<()> {
    if b.is_empty() || b.len() > 3 {
        return Err(LabError::InvalidInput(format!("{what} box must have 1 to 3 sides")));
    }
    if b.iter().any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi)) {
        return Err(LabError::InvalidInput(format!("{what} box must be finite and nondegenerate")));
    }
    Ok(())
}

impl PhaseSpaceFunction {
    pub fn new(sampler: Sampler, x_box: Vec<(f64, f64)>, xi_box: Vec<(f64, f64)>) -> Result<Self> {
        check_box(&x_box, "position")?;
        check_box(&xi_box, "velocity")?;
        if x_box.len() != xi_box.len() {
            return Err(LabError::InvalidInput("position and velocity boxes differ in dimension".into()));
        }
        Ok(Self { sampler, x_box, xi_box })
    }

    pub fn from_fn(
        f: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
        x_box: Vec<(f64, f64)>,
        xi_box: Vec<(f64, f64)>,
    ) -> Result<Self> {
        Self::new(Arc::new(f), x_box, xi_box)
    }

    /// The zero function on the given boxes.
    pub fn zero(x_box: Vec<(f64, f64)>, xi_box: Vec<(f64, f64)>) -> Result<Self> {
        Self::from_fn(|_, _| 0.0, x_box, xi_box)
    }

    pub fn dim(&self) -> usize {
        self.x_box.len()
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> f64 {
        let inside = |p: &[f64], b: &[(f64, f64)]| p.iter().zip(b).all(|(v, &(lo, hi))| *v >= lo && *v <= hi);
        if inside(x, &self.x_box) && inside(xi, &self.xi_box) {
            (self.sampler)(x, xi)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityOptions {
    /// Initial panels per side of the velocity box; doubled until two counts agree.
    pub panels: usize,
    pub max_panels: usize,
    /// Gauss–Legendre order per panel and side.
    pub order: usize,
    /// Relative agreement required between successive panel counts.
    pub tol: f64,
    /// Absolute agreement that suffices on its own.
    pub abs_tol: f64,
}

impl Default for VelocityOptions {
    fn default() -> Self {
        Self { panels: 8, max_panels: 1024, order: 12, tol: 1e-9, abs_tol: 1e-15 }
    }
}

const MAX_SHELL_DEPTH: usize = 1000;

struct CellRule<'a> {
    nodes: &'a [f64],
    weights: &'a [f64],
    singular: bool,
    depth: usize,
}

impl CellRule<'_> {
    /// Tensor Gauss rule on `[lo, hi]`; a cell with the origin at a corner is
    /// split in half per side, and only the corner child is split again.
    fn integrate(&self, lo: &[f64], hi: &[f64], level: usize, g: &dyn Fn(&[f64]) -> f64) -> f64 {
        let d = lo.len();
        let at_origin = self.singular && lo.iter().zip(hi).all(|(a, b)| *a == 0.0 || *b == 0.0);
        if at_origin && level < self.depth {
            let mut total = 0.0;
            for corner in 0..1usize << d {
                let mut clo = vec![0.0; d];
                let mut chi = vec![0.0; d];
                for k in 0..d {
                    let mid = 0.5 * (lo[k] + hi[k]);
                    if corner >> k & 1 == 0 {
                        clo[k] = lo[k];
                        chi[k] = mid;
                    } else {
                        clo[k] = mid;
                        chi[k] = hi[k];
                    }
                }
                total += self.integrate(&clo, &chi, level + 1, g);
            }
            return total;
        }
        if at_origin {
            // the innermost corner cell is dropped
            return 0.0;
        }
        let m = self.nodes.len();
        let mut idx = vec![0usize; d];
        let mut p = vec![0.0; d];
        let mut total = 0.0;
        loop {
            let mut w = 1.0;
            for k in 0..d {
                let half = 0.5 * (hi[k] - lo[k]);
                p[k] = lo[k] + half * (1.0 + self.nodes[idx[k]]);
                w *= half * self.weights[idx[k]];
            }
            total += w * g(&p);
            let mut k = 0;
            while k < d {
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == d {
                break;
            }
        }
        total
    }
}

/// Panel edges on `[lo, hi]`, with `0` inserted when it is interior.
fn edges(lo: f64, hi: f64, panels: usize, split_at_zero: bool) -> Vec<f64> {
    let mut e: Vec<f64> = (0..=panels).map(|i| lo + (hi - lo) * i as f64 / panels as f64).collect();
    if split_at_zero && lo < 0.0 && hi > 0.0 {
        e.retain(|v| v.abs() > 1e-14 * (hi - lo));
        let pos = e.partition_point(|&v| v < 0.0);
        e.insert(pos, 0.0);
    }
    e
}

fn box_integral(
    xi_box: &[(f64, f64)],
    panels: usize,
    rule: &CellRule,
    g: &dyn Fn(&[f64]) -> f64,
) -> f64 {
    let d = xi_box.len();
    let e: Vec<Vec<f64>> = xi_box.iter().map(|&(lo, hi)| edges(lo, hi, panels, rule.singular)).collect();
    let mut idx = vec![0usize; d];
    let mut total = 0.0;
    loop {
        let lo: Vec<f64> = (0..d).map(|k| e[k][idx[k]]).collect();
        let hi: Vec<f64> = (0..d).map(|k| e[k][idx[k] + 1]).collect();
        total += rule.integrate(&lo, &hi, 0, g);
        let mut k = 0;
        while k < d {
            idx[k] += 1;
            if idx[k] + 1 < e[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    total
}

/// `∫ g(ξ) Ψ(ξ)^{−2s} dξ` over the velocity box, checked against a doubled panel count.
pub(crate) fn weighted_velocity_integral(
    xi_box: &[(f64, f64)],
    s: f64,
    psi: Psi,
    opts: VelocityOptions,
    g: &dyn Fn(&[f64]) -> f64,
) -> Result<f64> {
    let d = xi_box.len();
    let singular = psi == Psi::Homogeneous && s > 0.0;
    if singular && 2.0 * s >= d as f64 {
        return Err(LabError::InvalidInput(format!("|ξ|^(-2s) with s = {s} is not integrable near 0 in d = {d}")));
    }
    if opts.panels == 0 || opts.order == 0 {
        return Err(LabError::InvalidInput("need at least one panel and one node".into()));
    }
    // the dropped corner cell of side ε carries about ε^{d−2s} of the mass
    let depth = if singular {
        let exponent = d as f64 - 2.0 * s;
        let levels = ((1e-3 * opts.tol).log2() / exponent).abs().ceil() as usize + 1;
        if levels > MAX_SHELL_DEPTH {
            return Err(LabError::InvalidInput(format!("weight |ξ|^(-2s) with s = {s} is too close to non-integrable")));
        }
        levels
    } else {
        0
    };
    let m = psi.multiplier(-2.0 * s);
    let weighted = |xi: &[f64]| {
        let w = if s == 0.0 { 1.0 } else { m.symbol(crate::dispersion::norm(xi)) };
        g(xi) * w
    };
    let (nodes, weights) = gauss_legendre(opts.order);
    let rule = CellRule { nodes: &nodes, weights: &weights, singular, depth };
    let scale = box_integral(xi_box, opts.panels, &rule, &|xi: &[f64]| weighted(xi).abs());
    let mut panels = opts.panels;
    let mut coarse = box_integral(xi_box, panels, &rule, &weighted);
    while 2 * panels <= opts.max_panels {
        panels *= 2;
        let fine = box_integral(xi_box, panels, &rule, &weighted);
        if (fine - coarse).abs() <= (opts.tol * scale).max(opts.abs_tol) {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(LabError::Numerical(format!(
        "velocity quadrature unresolved at {} panels per side (last value {coarse:.12e})",
        opts.max_panels
    )))
}

/// `∫ f(x − t∇φ(ξ), ξ) Ψ(ξ)^{−2s} dξ` over the velocity box.
pub fn velocity_average(
    f: &PhaseSpaceFunction,
    phi: &DispersionRelation,
    s: f64,
    psi: Psi,
    t: f64,
    x: &[f64],
    opts: VelocityOptions,
) -> Result<f64> {
    if x.len() != f.dim() {
        return Err(LabError::InvalidInput("point and phase-space dimension differ".into()));
    }
    let g = |xi: &[f64]| {
        let grad = phi.gradient(xi);
        let y: Vec<f64> = x.iter().zip(&grad).map(|(a, b)| a - t * b).collect();
        f.eval(&y, xi)
    };
    weighted_velocity_integral(&f.xi_box, s, psi, opts, &g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(a: f64, b: f64) -> PhaseSpaceFunction {
        // e^{−a x²} e^{−b ξ²}, boxes wide enough that truncation is below 1e−15
        PhaseSpaceFunction::from_fn(
            move |x, xi| (-a * x[0] * x[0] - b * xi[0] * xi[0]).exp(),
            vec![(-40.0, 40.0)],
            vec![(-12.0, 12.0)],
        )
        .unwrap()
    }

    #[test]
    fn time_zero_is_the_velocity_integral() {
        let f = gaussian(0.5, 1.0);
        let v = velocity_average(&f, &DispersionRelation::schrodinger(), 0.0, Psi::Homogeneous, 0.0, &[0.7], VelocityOptions::default()).unwrap();
        let exact = (-0.5f64 * 0.49).exp() * PI.sqrt();
        assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
    }

    #[test]
    fn gaussian_transport_closed_form() {
        // φ = ξ²/2 is |ξ|^2 scaled by 1/2; with ∇φ = ξ the average is
        // ∫ e^{−a(x−tξ)²−bξ²} dξ = √(π/(a t² + b)) e^{−abx²/(at²+b)}
        let (a, b) = (0.5, 1.0);
        let f = gaussian(a, b);
        let phi = DispersionRelation::schrodinger();
        for &(t, x) in &[(0.5, 0.3), (1.0, -1.2), (2.5, 2.0)] {
            // ∇|ξ|² = 2ξ, so time t here is time t/2 for ∇φ = ξ
            let tt = 2.0 * t;
            let v = velocity_average(&f, &phi, 0.0, Psi::Homogeneous, t, &[x], VelocityOptions::default()).unwrap();
            let den = a * tt * tt + b;
            let exact = (PI / den).sqrt() * (-a * b * x * x / den).exp();
            assert!((v - exact).abs() < 1e-11, "t = {t}: {v} vs {exact}");
        }
    }

    #[test]
    fn mass_is_conserved() {
        let f = PhaseSpaceFunction::from_fn(
            |x, xi| (-(x[0] - 0.3 * xi[0]).powi(2)).exp() * (-(xi[0] - 0.5).powi(2)).exp() * (1.0 + 0.2 * xi[0].sin()),
            vec![(-60.0, 60.0)],
            vec![(-8.0, 9.0)],
        )
        .unwrap();
        let phi = DispersionRelation::Power { alpha: 3.0 };
        let (nodes, weights) = gauss_legendre(24);
        let mass = |t: f64| -> f64 {
            let mut total = 0.0;
            for p in 0..240 {
                let (lo, hi) = (-120.0 + p as f64, -119.0 + p as f64);
                for (z, w) in nodes.iter().zip(&weights) {
                    let x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * z;
                    total += 0.5 * (hi - lo) * w * velocity_average(&f, &phi, 0.0, Psi::Homogeneous, t, &[x], VelocityOptions::default()).unwrap();
                }
            }
            total
        };
        let m0 = mass(0.0);
        let m1 = mass(0.4);
        assert!((m0 - m1).abs() < 1e-8 * m0, "{m0} vs {m1}");
    }

    #[test]
    fn singular_weight_uses_dyadic_cells() {
        // ∫_{−1}^{1} |ξ|^{−2s} dξ = 2/(1 − 2s)
        let s = 0.3;
        let f = PhaseSpaceFunction::from_fn(|_, _| 1.0, vec![(-1.0, 1.0)], vec![(-1.0, 1.0)]).unwrap();
        let v = velocity_average(&f, &DispersionRelation::Wave, s, Psi::Homogeneous, 0.0, &[0.0], VelocityOptions::default()).unwrap();
        let exact = 2.0 / (1.0 - 2.0 * s);
        assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
        // d = 2 on a square, against a polar oracle
        let g = PhaseSpaceFunction::from_fn(
            |_, _| 1.0,
            vec![(-1.0, 1.0), (-1.0, 1.0)],
            vec![(-0.5, 0.5), (-0.5, 0.5)],
        )
        .unwrap();
        let opts = VelocityOptions { tol: 1e-7, ..Default::default() };
        let v2 = velocity_average(&g, &DispersionRelation::Wave, s, Psi::Homogeneous, 0.0, &[0.0, 0.0], opts).unwrap();
        // 8 ∫_0^{π/4} ∫_0^{1/(2cosθ)} ρ^{1−2s} dρ dθ
        let (nodes, weights) = gauss_legendre(40);
        let mut oracle = 0.0;
        for (z, w) in nodes.iter().zip(&weights) {
            let th = PI / 8.0 * (1.0 + z);
            let rmax = 0.5 / th.cos();
            oracle += PI / 8.0 * w * rmax.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s);
        }
        oracle *= 8.0;
        assert!((v2 - oracle).abs() < 1e-7 * oracle, "{v2} vs {oracle}");
    }

    #[test]
    fn nonintegrable_weight_is_rejected() {
        let f = PhaseSpaceFunction::from_fn(|_, _| 1.0, vec![(-1.0, 1.0)], vec![(-1.0, 1.0)]).unwrap();
        let r = velocity_average(&f, &DispersionRelation::Wave, 0.5, Psi::Homogeneous, 0.0, &[0.0], VelocityOptions::default());
        assert!(r.is_err());
    }

    #[test]
    fn bad_boxes_are_rejected() {
        assert!(PhaseSpaceFunction::zero(vec![(1.0, 0.0)], vec![(0.0, 1.0)]).is_err());
        assert!(PhaseSpaceFunction::zero(vec![(0.0, 1.0)], vec![(0.0, f64::INFINITY)]).is_err());
        assert!(PhaseSpaceFunction::zero(vec![(0.0, 1.0)], vec![(0.0, 1.0), (0.0, 1.0)]).is_err());
    }
}
