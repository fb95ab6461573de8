//! van der Corput bounds.
//!
//! If `|θ^{(k)}| ≥ λ` on `[ρ₁, ρ₂]` (and `θ′` is monotone when `k = 1`), then
//! `|∫_{ρ₁}^{ρ₂} e^{iμθ} a| ≤ C_k (|a(ρ₂)| + ∫|a′|)(μλ)^{−1/k}`.
//! The constant `C_k = 5·2^{k−1} − 2` comes from the usual induction on `k`
//! (`C₁ = 3`, and `C_{k+1} = 2C_k + 2`).

use crate::error::{LabError, Result};

pub fn vdc_constant(k: u32) -> f64 {
    5.0 * 2f64.powi(k as i32 - 1) - 2.0
}

/// Upper bound for the oscillatory integral. `monotone_derivative` certifies that
/// `θ′` is monotone, which the `k = 1` case needs.
pub fn vdc_bound(
    k: u32,
    phase_derivative_lower: f64,
    amplitude_sup: f64,
    amplitude_variation: f64,
    mu: f64,
    monotone_derivative: bool,
) -> Result<f64> {
    if k == 0 {
        return Err(LabError::InvalidInput("k must be at least 1".into()));
    }
    if k == 1 && !monotone_derivative {
        return Err(LabError::InvalidInput("k = 1 needs a monotone phase derivative".into()));
    }
    if !(phase_derivative_lower > 0.0 && mu > 0.0) || amplitude_sup < 0.0 || amplitude_variation < 0.0 {
        return Err(LabError::InvalidInput("derivative bound and mu must be positive, amplitude data nonnegative".into()));
    }
    Ok(vdc_constant(k) * (amplitude_sup + amplitude_variation) * (mu * phase_derivative_lower).powf(-1.0 / k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillatory::quad::{integrate, Piece, QuadOptions};
    use num_complex::Complex64;

    #[test]
    fn constants() {
        assert_eq!(vdc_constant(1), 3.0);
        assert_eq!(vdc_constant(2), 8.0);
        assert_eq!(vdc_constant(3), 18.0);
    }

    #[test]
    fn plug_in_value() {
        let b = vdc_bound(2, 1.0, 1.0, 0.0, 100.0, false).unwrap();
        assert!((b - 0.8).abs() < 1e-15);
    }

    #[test]
    fn rejects_k1_without_monotonicity() {
        assert!(vdc_bound(1, 1.0, 1.0, 0.0, 10.0, false).is_err());
        assert!(vdc_bound(1, 1.0, 1.0, 0.0, 10.0, true).is_ok());
    }

    #[test]
    fn decreasing_in_mu() {
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let b = vdc_bound(3, 0.5, 1.0, 0.3, 1.5f64.powi(i), false).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    fn model(k: i32, mu: f64) -> f64 {
        let amp = |_: f64| Complex64::new(1.0, 0.0);
        let ph = move |r: f64| mu * r.powi(k);
        let dph = move |r: f64| mu * k as f64 * r.powi(k - 1);
        let piece = Piece { amp: &amp, phase: &ph, dphase: &dph };
        let q = integrate(&piece, 0.0, 1.0, 1e-12, QuadOptions::default());
        assert!(q.converged);
        q.value.norm()
    }

    #[test]
    fn dominates_fresnel_model() {
        for mu in [10.0, 1e2, 1e3] {
            let measured = model(2, mu);
            let bound = vdc_bound(2, 2.0, 1.0, 0.0, mu, false).unwrap();
            assert!(bound >= measured, "mu={mu}: {bound} < {measured}");
        }
    }

    #[test]
    fn dominates_monomial_phases() {
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        for k in 1..=4 {
            for mu in [3.0, 30.0, 300.0, 3000.0] {
                let measured = model(k, mu);
                let bound = vdc_bound(k as u32, fact[k as usize], 1.0, 0.0, mu, true).unwrap();
                assert!(bound >= measured, "k={k} mu={mu}");
            }
        }
    }
}
