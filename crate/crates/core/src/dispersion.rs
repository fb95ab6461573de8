//! Radial dispersion relations `φ(ξ) = φ₀(|ξ|)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// One term `c·ρ^p` of a power-sum profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub coef: f64,
    pub power: f64,
}

/// A radial symbol `φ₀(ρ) = Σ cᵢ ρ^{pᵢ}` declared almost homogeneous of order `alpha`.
///
/// Power sums keep every derivative analytic and make the rescaling
/// `φ_s(ξ) = s^{−α} φ(sξ)` exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlmostHomogeneousSymbol {
    pub alpha: f64,
    pub terms: Vec<PowerTerm>,
}

/// Measured class constants on a log-spaced sample of `|ξ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolCertificate {
    pub d1: f64,
    pub d2: f64,
    /// Minimum absolute Hessian eigenvalue over `|ξ|^{α−2}`.
    pub lambda: f64,
    /// Radial derivative bound up to order `d + 2`.
    pub b: f64,
    /// Sampled minimum of `|vᵀHφ v| / |ξ|^{α−2}` over random unit `v`.
    pub quadratic_form_min: f64,
    /// Radial and tangential Hessian eigenvalues have opposite signs somewhere.
    pub indefinite: bool,
}

impl AlmostHomogeneousSymbol {
    pub fn new(alpha: f64, terms: Vec<PowerTerm>) -> Result<Self> {
        if alpha == 0.0 || alpha == 1.0 || !alpha.is_finite() {
            return Err(LabError::InvalidInput(format!("order alpha = {alpha} must be finite and not 0 or 1")));
        }
        if terms.is_empty() {
            return Err(LabError::InvalidInput("symbol needs at least one term".into()));
        }
        Ok(Self { alpha, terms })
    }

    pub fn homogeneous(alpha: f64) -> Result<Self> {
        Self::new(alpha, vec![PowerTerm { coef: 1.0, power: alpha }])
    }

    /// k-th derivative of the profile.
    pub fn derivative(&self, k: u32, rho: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut c = t.coef;
                for i in 0..k {
                    c *= t.power - i as f64;
                }
                if c == 0.0 {
                    0.0
                } else {
                    c * rho.powf(t.power - k as f64)
                }
            })
            .sum()
    }

    /// `φ_s(ξ) = s^{−α} φ(sξ)`.
    pub fn rescaled(&self, s: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| PowerTerm { coef: t.coef * s.powf(t.power - self.alpha), power: t.power })
            .collect();
        Self { alpha: self.alpha, terms }
    }

    pub fn certify<R: Rng>(&self, d: u32, rng: &mut R) -> SymbolCertificate {
        let a = self.alpha;
        let mut cert = SymbolCertificate {
            d1: f64::INFINITY,
            d2: 0.0,
            lambda: f64::INFINITY,
            b: 0.0,
            quadratic_form_min: f64::INFINITY,
            indefinite: false,
        };
        for i in 0..=400 {
            let rho = 2f64.powf(-20.0 + 40.0 * i as f64 / 400.0);
            let g = self.derivative(1, rho).abs() / rho.powf(a - 1.0);
            cert.d1 = cert.d1.min(g);
            cert.d2 = cert.d2.max(g);
            let radial = self.derivative(2, rho);
            let tangential = self.derivative(1, rho) / rho;
            let scale = rho.powf(a - 2.0);
            let mut eig_min = radial.abs();
            if d >= 2 {
                eig_min = eig_min.min(tangential.abs());
                if radial * tangential < 0.0 {
                    cert.indefinite = true;
                }
            }
            cert.lambda = cert.lambda.min(eig_min / scale);
            for k in 0..=(d + 2) {
                let v = self.derivative(k, rho).abs() / rho.powf(a - k as f64);
                cert.b = cert.b.max(v);
            }
            for _ in 0..4 {
                // in the eigenbasis, vᵀHv = radial·c² + tangential·(1 − c²)
                let c2 = if d == 1 { 1.0 } else { random_radial_share(d, rng) };
                let form = radial * c2 + tangential * (1.0 - c2);
                cert.quadratic_form_min = cert.quadratic_form_min.min(form.abs() / scale);
            }
        }
        cert
    }
}

/// Squared first coordinate of a uniform random unit vector in `ℝ^d`.
fn random_radial_share<R: Rng>(d: u32, rng: &mut R) -> f64 {
    use rand_distr::{Distribution, StandardNormal};
    let mut first = 0.0;
    let mut total = 0.0;
    for i in 0..d {
        let g: f64 = StandardNormal.sample(rng);
        if i == 0 {
            first = g * g;
        }
        total += g * g;
    }
    first / total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DispersionRelation {
    /// `|ξ|^α`.
    Power { alpha: f64 },
    /// `|ξ|`.
    Wave,
    /// `⟨ξ⟩ = (1 + |ξ|²)^{1/2}`.
    KleinGordon,
    Symbol(AlmostHomogeneousSymbol),
}

impl DispersionRelation {
    pub fn schrodinger() -> Self {
        DispersionRelation::Power { alpha: 2.0 }
    }

    /// Radial profile `φ₀(ρ)`; `+∞` at `ρ = 0` for negative orders.
    pub fn profile(&self, rho: f64) -> f64 {
        match self {
            DispersionRelation::Power { alpha } => {
                if rho == 0.0 {
                    if *alpha > 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    rho.powf(*alpha)
                }
            }
            DispersionRelation::Wave => rho,
            DispersionRelation::KleinGordon => (1.0 + rho * rho).sqrt(),
            DispersionRelation::Symbol(s) => {
                if rho == 0.0 {
                    if s.alpha > 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    s.derivative(0, rho)
                }
            }
        }
    }

    pub fn d1(&self, rho: f64) -> f64 {
        match self {
            DispersionRelation::Power { alpha } => alpha * rho.powf(alpha - 1.0),
            DispersionRelation::Wave => 1.0,
            DispersionRelation::KleinGordon => rho / (1.0 + rho * rho).sqrt(),
            DispersionRelation::Symbol(s) => s.derivative(1, rho),
        }
    }

    pub fn d2(&self, rho: f64) -> f64 {
        match self {
            DispersionRelation::Power { alpha } => alpha * (alpha - 1.0) * rho.powf(alpha - 2.0),
            DispersionRelation::Wave => 0.0,
            DispersionRelation::KleinGordon => (1.0 + rho * rho).powf(-1.5),
            DispersionRelation::Symbol(s) => s.derivative(2, rho),
        }
    }

    /// Homogeneity order when there is one.
    pub fn order(&self) -> Option<f64> {
        match self {
            DispersionRelation::Power { alpha } => Some(*alpha),
            DispersionRelation::Wave => Some(1.0),
            DispersionRelation::KleinGordon => None,
            DispersionRelation::Symbol(s) => Some(s.alpha),
        }
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.profile(norm(xi))
    }

    /// `∇φ(ξ) = φ₀′(|ξ|) ξ/|ξ|`, zero at the origin.
    pub fn gradient(&self, xi: &[f64]) -> Vec<f64> {
        let r = norm(xi);
        if r == 0.0 {
            return vec![0.0; xi.len()];
        }
        let g = self.d1(r) / r;
        xi.iter().map(|v| v * g).collect()
    }

    /// `det Hφ` of the radial symbol: `φ₀″ (φ₀′/ρ)^{d−1}`.
    pub fn hessian_det(&self, d: u32, rho: f64) -> f64 {
        self.d2(rho) * (self.d1(rho) / rho).powi(d as i32 - 1)
    }
}

pub fn norm(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum::<f64>().sqrt()
}
