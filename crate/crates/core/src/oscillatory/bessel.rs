//! Bessel functions of integer and half-integer order and the Fourier
//! transform of the unit sphere's surface measure.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{LabError, Result};

fn is_half_integer(nu: f64) -> bool {
    (nu - nu.floor() - 0.5).abs() < 1e-12
}

fn is_integer(nu: f64) -> bool {
    (nu - nu.round()).abs() < 1e-12
}

/// Hankel coefficient `a_k(ν) = Π_{j≤k}(4ν² − (2j−1)²) / (k! 8^k)`.
pub fn hankel_coeff(nu: f64, k: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut a = 1.0;
    for j in 1..=k {
        a *= (mu - ((2 * j - 1) as f64).powi(2)) / (j as f64 * 8.0);
    }
    a
}

/// The large-argument factors `P(z) + iQ(z)` with
/// `J_ν(z) = √(2/(πz)) Re(e^{iω}(P + iQ))`, `ω = z − νπ/2 − π/4`.
/// Exact for half-integer `ν`; asymptotic (truncated at the smallest term) otherwise.
fn hankel_pq(nu: f64, z: f64) -> Complex64 {
    let mut p = 0.0;
    let mut q = 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..60 {
        let a = hankel_coeff(nu, k);
        if a == 0.0 {
            break;
        }
        let term = a / z.powi(k as i32);
        if term.abs() > prev && !is_half_integer(nu) {
            break;
        }
        prev = term.abs();
        // P = Σ (−1)^m a_{2m} z^{−2m}, Q = Σ (−1)^m a_{2m+1} z^{−2m−1}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 * p.abs().max(1.0) {
            break;
        }
    }
    Complex64::new(p, q)
}

fn gamma_shifted(nu: f64) -> f64 {
    // Γ(ν + 1) for ν integer or half-integer ≥ −1/2
    let mut g = if is_integer(nu) { 1.0 } else { PI.sqrt() };
    let mut s = if is_integer(nu) { 1.0 } else { 0.5 };
    while s <= nu + 1e-9 {
        g *= s;
        s += 1.0;
    }
    g
}

/// `z^{−ν} J_ν(z)` by its power series (accurate for small `z`).
fn scaled_series(nu: f64, z: f64) -> f64 {
    let x = -(z * z) / 4.0;
    let mut term = 1.0 / (2f64.powf(nu) * gamma_shifted(nu));
    let mut sum = term;
    for m in 1..80 {
        term *= x / (m as f64 * (m as f64 + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `J_ν(z)` for `z ≥ 0` and integer or half-integer `ν ≥ −1/2`.
pub fn bessel_j(nu: f64, z: f64) -> Result<f64> {
    if !(is_integer(nu) || is_half_integer(nu)) || nu < -0.5 {
        return Err(LabError::InvalidInput(format!("Bessel order {nu} unsupported")));
    }
    if z < 0.0 {
        return Err(LabError::InvalidInput("Bessel argument must be nonnegative".into()));
    }
    if z < 4.0 {
        return Ok(scaled_series(nu, z) * z.powf(nu));
    }
    if is_integer(nu) && z < 25.0 {
        // trapezoid on the full period of cos(nθ − z sin θ) is spectrally accurate
        let n = 128;
        let sum: f64 = (0..n)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                (nu * th - z * th.sin()).cos()
            })
            .sum();
        return Ok(sum / n as f64);
    }
    let omega = z - nu * PI / 2.0 - PI / 4.0;
    let pq = hankel_pq(nu, z);
    Ok((2.0 / (PI * z)).sqrt() * (Complex64::from_polar(1.0, omega) * pq).re)
}

pub fn sphere_area(d: u32) -> f64 {
    let nu = d as f64 / 2.0 - 1.0;
    (2.0 * PI).powf(d as f64 / 2.0) * scaled_series(nu, 0.0)
}

/// Value of `∫_{S^{d−1}} e^{iρ ω₁} dσ(ω)`, with the leading large-`ρ` term for `ρ ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereFt {
    pub value: f64,
    pub leading: Option<f64>,
    pub leading_error_bound: Option<f64>,
}

pub fn sphere_ft(d: u32, rho: f64) -> Result<SphereFt> {
    if d < 2 {
        return Err(LabError::InvalidInput("sphere transform needs d >= 2; use 2cos(ρ) for d = 1".into()));
    }
    if rho < 0.0 {
        return Err(LabError::InvalidInput("radius must be nonnegative".into()));
    }
    let value = sphere_ft_value(d, rho);
    let (leading, bound) = if rho >= 1.0 {
        let nu = d as f64 / 2.0 - 1.0;
        let c = 2.0 * (2.0 * PI).powf((d as f64 - 1.0) / 2.0) * rho.powf(-(d as f64 - 1.0) / 2.0);
        let lead = c * (rho - (d as f64 - 1.0) * PI / 4.0).cos();
        let bound = c * (hankel_coeff(nu, 1).abs() / rho + hankel_coeff(nu, 2).abs() / (rho * rho));
        (Some(lead), Some(bound))
    } else {
        (None, None)
    };
    Ok(SphereFt { value, leading, leading_error_bound: bound })
}

/// `σ̂_d(z) = (2π)^{d/2} z^{−ν} J_ν(z)`, `ν = d/2 − 1`; `d = 1` gives `2 cos z`.
pub fn sphere_ft_value(d: u32, z: f64) -> f64 {
    if d == 1 {
        return 2.0 * z.cos();
    }
    let nu = d as f64 / 2.0 - 1.0;
    let c = (2.0 * PI).powf(d as f64 / 2.0);
    if z < 4.0 {
        c * scaled_series(nu, z)
    } else {
        c * bessel_j(nu, z).unwrap() * z.powf(-nu)
    }
}

/// Argument above which the split `σ̂_d(z) = e^{iz}S₊(z) + e^{−iz}S₋(z)` is used.
pub fn split_threshold(d: u32) -> f64 {
    if d == 1 {
        0.0
    } else if d % 2 == 1 {
        2.0
    } else {
        25.0
    }
}

/// Non-oscillatory factors `(S₊(z), S₋(z))` of the sphere transform.
pub fn sphere_ft_branches(d: u32, z: f64) -> (Complex64, Complex64) {
    if d == 1 {
        return (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    }
    let nu = d as f64 / 2.0 - 1.0;
    let c = (2.0 * PI).powf(d as f64 / 2.0) * z.powf(-nu) * (2.0 / (PI * z)).sqrt() * 0.5;
    let shift = Complex64::from_polar(1.0, -(nu * PI / 2.0 + PI / 4.0));
    let pq = hankel_pq(nu, z);
    (c * shift * pq, c * shift.conj() * pq.conj())
}
