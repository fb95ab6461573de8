//! Adaptive quadrature for `∫ A(ρ) e^{iΦ(ρ)} dρ` on a finite interval.
//!
//! Panels with little phase variation use 16-point Gauss–Legendre checked
//! against its two halves. Panels where `Φ′` keeps one sign and the phase
//! turns at least once use Levin collocation: solve `p′ + iΦ′p = A` on
//! Chebyshev–Lobatto points, so the integral is `p e^{iΦ}` at the endpoints,
//! checked between 16 and 24 points. Everything else is bisected.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::rules::{chebyshev, gl16};

pub struct Piece<'a> {
    pub amp: &'a (dyn Fn(f64) -> Complex64 + Sync),
    pub phase: &'a (dyn Fn(f64) -> f64 + Sync),
    pub dphase: &'a (dyn Fn(f64) -> f64 + Sync),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub leaves: usize,
    pub converged: bool,
}

impl Default for QuadResult {
    fn default() -> Self {
        Self { value: Complex64::new(0.0, 0.0), error: 0.0, leaves: 0, converged: true }
    }
}

impl QuadResult {
    pub fn absorb(&mut self, other: QuadResult) {
        self.value += other.value;
        self.error += other.error;
        self.leaves += other.leaves;
        self.converged &= other.converged;
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub max_leaves: usize,
    pub max_depth: u32,
    pub use_levin: bool,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { max_leaves: 200_000, max_depth: 60, use_levin: true }
    }
}

/// Gauss–Legendre value and the roundoff scale `Σ|wᵢAᵢ|(1 + |Φᵢ|)`: `e^{iΦ}` carries
/// an absolute error of order `|Φ|·ε`.
fn gauss(piece: &Piece, a: f64, b: f64) -> (Complex64, f64) {
    let (x, w) = gl16();
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let mut s = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let r = m + h * xi;
        let a = (piece.amp)(r);
        let ph = (piece.phase)(r);
        mass += wi * a.norm() * (1.0 + ph.abs());
        s += a * Complex64::from_polar(*wi, ph);
    }
    (s * h, mass * h)
}

const ROUNDOFF: f64 = 64.0 * f64::EPSILON;

fn levin(piece: &Piece, a: f64, b: f64, n: usize) -> Option<(Complex64, f64)> {
    let cheb = chebyshev(n);
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    let mut rhs = DVector::<Complex64>::zeros(n);
    for i in 0..n {
        let r = m + h * cheb.nodes[i];
        for j in 0..n {
            mat[(i, j)] = Complex64::new(cheb.diff[(i, j)] / h, 0.0);
        }
        mat[(i, i)] += Complex64::new(0.0, (piece.dphase)(r));
        rhs[i] = (piece.amp)(r);
    }
    let p = mat.lu().solve(&rhs)?;
    if p.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return None;
    }
    let (pb, pa) = ((piece.phase)(b), (piece.phase)(a));
    let scale = p.iter().map(|v| v.norm()).fold(0.0, f64::max) * (1.0 + pa.abs().max(pb.abs()));
    // node 0 is the right endpoint
    let v = p[0] * Complex64::from_polar(1.0, pb) - p[n - 1] * Complex64::from_polar(1.0, pa);
    Some((v, scale))
}

enum Panel {
    Gauss,
    Levin,
    Split,
}

fn classify(piece: &Piece, a: f64, b: f64, use_levin: bool) -> Panel {
    let len = b - a;
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut pos = false;
    let mut neg = false;
    for k in 0..=8 {
        let r = a + len * (1.0 - (PI * k as f64 / 8.0).cos()) / 2.0;
        let d = (piece.dphase)(r);
        lo = lo.min(d.abs());
        hi = hi.max(d.abs());
        pos |= d > 0.0;
        neg |= d < 0.0;
    }
    if hi * len <= 3.0 * PI {
        Panel::Gauss
    } else if use_levin && !(pos && neg) && lo * len >= 2.0 * PI && hi <= 64.0 * lo {
        Panel::Levin
    } else {
        Panel::Split
    }
}

/// Integrates `piece` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate(piece: &Piece, a: f64, b: f64, tol: f64, opts: QuadOptions) -> QuadResult {
    let mut out = QuadResult::default();
    if b <= a {
        return out;
    }
    let mut stack = vec![(a, b, tol, 0u32)];
    while let Some((a, b, tol, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let forced = depth >= opts.max_depth || out.leaves >= opts.max_leaves || m <= a || m >= b;
        let estimate = match classify(piece, a, b, opts.use_levin) {
            Panel::Gauss => {
                let (whole, _) = gauss(piece, a, b);
                let (left, ml) = gauss(piece, a, m);
                let (right, mr) = gauss(piece, m, b);
                let halves = left + right;
                Some((halves, (whole - halves).norm(), ROUNDOFF * (ml + mr)))
            }
            Panel::Levin => match (levin(piece, a, b, 16), levin(piece, a, b, 24)) {
                (Some((l16, _)), Some((l24, scale))) => Some((l24, (l16 - l24).norm(), ROUNDOFF * 1e2 * scale)),
                _ => None,
            },
            Panel::Split => None,
        };
        match estimate {
            Some((v, e, floor)) if e <= tol.max(floor) || forced => {
                out.value += v;
                out.error += e;
                out.leaves += 1;
                if e > tol.max(floor) {
                    out.converged = false;
                }
            }
            None if forced => {
                let (v, _) = gauss(piece, a, b);
                out.value += v;
                out.error += (v - gauss(piece, a, m).0 - gauss(piece, m, b).0).norm();
                out.leaves += 1;
                out.converged = false;
            }
            _ => {
                let child = tol / std::f64::consts::SQRT_2;
                stack.push((m, b, child, depth + 1));
                stack.push((a, m, child, depth + 1));
            }
        }
    }
    out
}
