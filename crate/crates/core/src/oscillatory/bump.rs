//! The smooth cutoff `χ` and its dyadic pieces.

/// `χ ∈ C_c^∞(−1, 1)`, identically 1 on `[−1/2, 1/2]`.
pub fn smooth_bump(u: f64) -> f64 {
    let a = u.abs();
    if a <= 0.5 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        let w = 2.0 * a - 1.0;
        (1.0 - 1.0 / (1.0 - w * w)).exp()
    }
}

/// Derivative of [`smooth_bump`].
pub fn smooth_bump_deriv(u: f64) -> f64 {
    let a = u.abs();
    if a <= 0.5 || a >= 1.0 {
        return 0.0;
    }
    let w = 2.0 * a - 1.0;
    let one_m = 1.0 - w * w;
    let val = (1.0 - 1.0 / one_m).exp();
    // d/da exp(1 - 1/(1-w²)) = val · (−2w/(1−w²)²) · 2
    let d = val * (-2.0 * w / (one_m * one_m)) * 2.0;
    d * u.signum()
}

/// `χ₀(u) = χ(u/2) − χ(u)`, supported in `1/2 ≤ |u| ≤ 2`.
pub fn annulus_bump(u: f64) -> f64 {
    smooth_bump(0.5 * u) - smooth_bump(u)
}

/// `χ_j(u) = χ₀(2^{−j} u)`.
pub fn dyadic_piece(j: i32, u: f64) -> f64 {
    annulus_bump(u * 2f64.powi(-j))
}

/// `χ_∞ = 1 − χ`.
pub fn bump_complement(u: f64) -> f64 {
    1.0 - smooth_bump(u)
}

/// Dyadic indices `j` with `χ_j(u) ≠ 0` (at most two).
pub fn active_pieces(u: f64) -> impl Iterator<Item = i32> {
    let u = u.abs();
    let center = if u > 0.0 { u.log2().floor() as i32 } else { i32::MIN + 2 };
    (center - 1..=center + 1).filter(move |&j| u > 0.0 && dyadic_piece(j, u) != 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plateau_and_support() {
        assert_eq!(smooth_bump(0.3), 1.0);
        assert_eq!(smooth_bump(1.2), 0.0);
        assert_eq!(smooth_bump(-0.5), 1.0);
        assert!(smooth_bump(0.75) > 0.0 && smooth_bump(0.75) < 1.0);
    }

    #[test]
    fn partition_of_unity_example() {
        let s: f64 = (-20..=20).map(|j| dyadic_piece(j, 0.77)).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for u in [0.55, 0.7, 0.9, -0.8] {
            let h = 1e-6;
            let fd = (smooth_bump(u + h) - smooth_bump(u - h)) / (2.0 * h);
            assert!((fd - smooth_bump_deriv(u)).abs() < 1e-6, "u = {u}");
        }
    }

    proptest! {
        #[test]
        fn dyadic_sum_is_one_away_from_zero(u in 1e-5f64..1e5) {
            let s: f64 = (-30..=30).map(|j| dyadic_piece(j, u)).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
            let active: f64 = active_pieces(u).map(|j| dyadic_piece(j, u)).sum();
            prop_assert!((active - 1.0).abs() < 1e-12);
        }

        #[test]
        fn bump_in_unit_interval(u in -3.0f64..3.0) {
            let v = smooth_bump(u);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert_eq!(v, smooth_bump(-u));
        }
    }
}
