//! Property tests for the exponent calculus and the norm layer.

use dispersive_lab::exponents::{
    beta_sigma, classify_pair, necessary_beta_bounds, region_membership, sobolev_exponent, Admissibility, Equation,
    Exponent, RegionLabel, Vertex,
};
use dispersive_lab::norms::{besov_norm, hls_ratio, lorentz_norm, schatten_norm, OperatorMatrix};
use dispersive_lab::spectral::{Field, Grid};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

fn complex_matrix(n: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| DMatrix::from_iterator(n, n, v.into_iter().map(|(a, b)| Complex64::new(a, b))))
}

/// Unitary factor of the QR decomposition of a random matrix.
fn unitary(n: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    complex_matrix(n).prop_map(|m| m.qr().q())
}

fn rational_r() -> impl Strategy<Value = Rational64> {
    // r ∈ [2, 50) as p/q
    (1i64..40, 2i64..100).prop_map(|(den, extra)| Rational64::new(2 * den + extra, den))
}

#[test]
fn sharp_line_beta_over_hundred_rationals() {
    let sigma = Rational64::new(3, 2);
    for k in 0..100i64 {
        let r = Rational64::new(2 * 97 + 3 * k, 97);
        let rr = Exponent::Finite(r);
        let inv_q = sigma * (Rational64::new(1, 2) - r.recip());
        let q = Exponent::from_reciprocal(inv_q);
        if q < Exponent::int(2) {
            continue;
        }
        assert_eq!(classify_pair(q, rr, sigma).unwrap(), Admissibility::Sharp);
        let expect = Rational64::from_integer(2) * r / (r + Rational64::from_integer(2));
        assert_eq!(beta_sigma(q, rr, sigma).unwrap(), Exponent::Finite(expect));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sharp_beta_is_two_r_over_r_plus_two(r in rational_r(), sn in 1i64..8, sd in 1i64..4) {
        let sigma = Rational64::new(sn, sd);
        let q = Exponent::from_reciprocal(sigma * (Rational64::new(1, 2) - r.recip()));
        prop_assume!(q >= Exponent::int(2));
        let rr = Exponent::Finite(r);
        prop_assert_eq!(classify_pair(q, rr, sigma).unwrap(), Admissibility::Sharp);
        let two = Rational64::from_integer(2);
        prop_assert_eq!(beta_sigma(q, rr, sigma).unwrap(), Exponent::Finite(two * r / (r + two)));
    }

    #[test]
    fn interior_oac_is_admissible(a in 1i64..200, b in 1i64..200, sn in 1i64..6) {
        let sigma = Rational64::new(sn, 2);
        let inv_r = Rational64::new(a, 401);
        let inv_q = Rational64::new(b, 401);
        let r = Exponent::from_reciprocal(inv_r);
        let q = Exponent::from_reciprocal(inv_q);
        let m = region_membership(sigma, q, r).unwrap();
        if m.all.contains(&RegionLabel::Interior(vec![Vertex::O, Vertex::A, Vertex::C])) {
            let class = classify_pair(q, r, sigma).unwrap();
            prop_assert!(matches!(class, Admissibility::Sharp | Admissibility::NonSharp));
            prop_assert!(!q.is_infinite());
        }
    }

    #[test]
    fn scaling_bound_nondecreasing_in_r(d in 1u32..5, qn in 2i64..40, r1 in rational_r(), r2 in rational_r()) {
        let q = Exponent::int(qn);
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let (b_lo, _) = necessary_beta_bounds(d, q, Exponent::Finite(lo)).unwrap();
        let (b_hi, _) = necessary_beta_bounds(d, q, Exponent::Finite(hi)).unwrap();
        // 1/β = 1/(σq) + 2/r falls as r grows
        prop_assert!(b_lo <= b_hi);
    }

    #[test]
    fn wave_regularity_on_sharp_line(d in 2u32..6, r in rational_r()) {
        let sigma = Rational64::new(d as i64 - 1, 2);
        let q = Exponent::from_reciprocal(sigma * (Rational64::new(1, 2) - r.recip()));
        prop_assume!(q >= Exponent::int(2));
        let rr = Exponent::Finite(r);
        prop_assert_eq!(classify_pair(q, rr, sigma).unwrap(), Admissibility::Sharp);
        let s = sobolev_exponent(d, Equation::Wave, q, rr).unwrap().s;
        let expect = Rational64::new(d as i64 + 1, 2) * (Rational64::new(1, 2) - r.recip());
        prop_assert_eq!(s, expect);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schatten_holder(a in complex_matrix(5), b in complex_matrix(5), beta in 1.05f64..8.0) {
        let dual = beta / (beta - 1.0);
        let ab = OperatorMatrix::new(&a * &b);
        let trace_abs: f64 = ab.singular_values().iter().sum();
        let rhs = schatten_norm(&OperatorMatrix::new(a), beta).unwrap() * schatten_norm(&OperatorMatrix::new(b), dual).unwrap();
        prop_assert!(trace_abs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn schatten_monotone(a in complex_matrix(6), p in 1.0f64..6.0, dq in 0.0f64..6.0) {
        let m = OperatorMatrix::new(a);
        let small = schatten_norm(&m, p + dq).unwrap();
        let large = schatten_norm(&m, p).unwrap();
        prop_assert!(small <= large * (1.0 + 1e-12));
        prop_assert!(schatten_norm(&m, f64::INFINITY).unwrap() <= small * (1.0 + 1e-12));
    }

    #[test]
    fn schatten_unitary_invariance(a in complex_matrix(6), u in unitary(6), v in unitary(6), beta in 1.0f64..10.0) {
        let base = schatten_norm(&OperatorMatrix::new(a.clone()), beta).unwrap();
        let moved = schatten_norm(&OperatorMatrix::new(&u * a * &v), beta).unwrap();
        prop_assert!((base - moved).abs() <= 1e-10 * base.max(1.0));
    }

    #[test]
    fn lorentz_diagonal_is_lebesgue(vals in prop::collection::vec(0.0f64..5.0, 1..30), p in 1.1f64..6.0) {
        let w: Vec<f64> = (0..vals.len()).map(|i| 0.5 + (i % 3) as f64).collect();
        let direct = vals.iter().zip(&w).map(|(v, w)| w * v.powf(p)).sum::<f64>().powf(1.0 / p);
        let l = lorentz_norm(&vals, &w, p, p).unwrap();
        prop_assert!((l - direct).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn besov_nonincreasing_in_beta(coef in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64), s in -1.0f64..1.0) {
        let grid = Grid::new(1, 64, 2.0 * std::f64::consts::PI).unwrap();
        let f = Field::new(grid, coef.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap();
        let mut last = f64::INFINITY;
        for beta in [1.0, 1.5, 2.0, 4.0, 16.0] {
            for homogeneous in [true, false] {
                let _ = besov_norm(&f, s, beta, homogeneous).unwrap();
            }
            let v = besov_norm(&f, s, beta, true).unwrap();
            prop_assert!(v <= last * (1.0 + 1e-12));
            last = v;
        }
    }
}

#[test]
fn hls_ratio_is_stable_under_refinement() {
    use rand::{Rng, SeedableRng};
    let (lambda, p1) = (0.5, 1.25);
    let mut sups = Vec::new();
    for n in [64usize, 128] {
        let h = 8.0 / n as f64;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut sup: f64 = 0.0;
        for _ in 0..100 {
            // piecewise-constant data on 16 coarse blocks, so both grids see the same functions
            let blocks1: Vec<f64> = (0..16).map(|_| rng.gen_range(0.0..1.0)).collect();
            let blocks2: Vec<f64> = (0..16).map(|_| rng.gen_range(0.0..1.0)).collect();
            let g1: Vec<f64> = (0..n).map(|i| blocks1[i * 16 / n]).collect();
            let g2: Vec<f64> = (0..n).map(|i| blocks2[i * 16 / n]).collect();
            sup = sup.max(hls_ratio(&g1, &g2, h, lambda, p1).unwrap());
        }
        assert!(sup.is_finite() && sup > 0.0);
        sups.push(sup);
    }
    assert!((sups[0] - sups[1]).abs() < 0.05 * sups[0], "{sups:?}");
}
