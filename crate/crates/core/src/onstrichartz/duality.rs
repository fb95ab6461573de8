//! The density bound for `T` against the Schatten bound for `W T T* W̄`.
//!
//! With `μ` the spacetime cell measure, `W T T* W̄` on `L²(μ)` is unitarily
//! equivalent to `B B*` with `B = diag(μ^{1/2}) W T`, so its `C^{β′}` norm is
//! `‖B‖²_{C^{2β′}}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::lhs::real_lp;
use super::stream_rng;
use crate::dispersion::DispersionRelation;
use crate::error::{LabError, Result};
use crate::norms::{schatten_norm, time_norm, trapezoid_weights, MixedNormSpec, OperatorMatrix};
use crate::spectral::{propagate, Field};

/// Matrix of `T` from coefficient space (standard inner product) to samples on
/// `times × space`; row `k·nx + i` is time `k`, point `i`.
#[derive(Debug, Clone)]
pub struct SpacetimeOperator {
    pub matrix: DMatrix<Complex64>,
    pub times: Vec<f64>,
    pub nx: usize,
    /// Spatial cell volume.
    pub cell: f64,
}

impl SpacetimeOperator {
    pub fn new(matrix: DMatrix<Complex64>, times: Vec<f64>, nx: usize, cell: f64) -> Result<Self> {
        if times.is_empty() || nx == 0 || matrix.nrows() != times.len() * nx || matrix.ncols() == 0 {
            return Err(LabError::InvalidInput("operator shape does not match the spacetime grid".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) || !(cell > 0.0) {
            return Err(LabError::InvalidInput("times must increase and the cell must be positive".into()));
        }
        Ok(Self { matrix, times, nx, cell })
    }

    /// Columns `e^{itφ(D)} e_i` for an orthonormal basis `e_i`.
    pub fn from_propagator(basis: &[Field], phi: &DispersionRelation, times: &[f64]) -> Result<Self> {
        let Some(first) = basis.first() else {
            return Err(LabError::InvalidInput("empty basis".into()));
        };
        let grid = first.grid;
        let nx = grid.len();
        let mut m = DMatrix::zeros(times.len() * nx, basis.len());
        for (c, e) in basis.iter().enumerate() {
            for (k, &t) in times.iter().enumerate() {
                let u = propagate(e, phi, t);
                for (i, v) in u.values.iter().enumerate() {
                    m[(k * nx + i, c)] = *v;
                }
            }
        }
        Self::new(m, times.to_vec(), nx, grid.cell_volume())
    }

    fn measure(&self) -> Vec<f64> {
        let w = trapezoid_weights(&self.times);
        let mut mu = Vec::with_capacity(self.matrix.nrows());
        for wt in w {
            mu.extend(std::iter::repeat(wt * self.cell).take(self.nx));
        }
        mu
    }

    /// `‖F‖_{L^q_t L^r_x}` of a spacetime array.
    fn mixed(&self, values: &[f64], q: f64, r: f64) -> Result<f64> {
        let profile: Vec<f64> = values.chunks(self.nx).map(|c| real_lp(c, self.cell, r)).collect();
        time_norm(&profile, &self.times, &MixedNormSpec::new(q, r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub beta: f64,
    pub q: f64,
    pub r: f64,
    /// `1/q̃ = 1/2 − 1/q`.
    pub q_tilde: f64,
    pub r_tilde: f64,
    pub trials: usize,
    /// `sup ‖Σ ν_j |T f_j|²‖_{L^{q/2}L^{r/2}} / ‖ν‖_β` over the sampled families.
    pub density_sup: f64,
    /// `sup ‖W T T* W̄‖_{C^{β′}} / ‖W‖²_{L^{q̃}L^{r̃}}` over the sampled weights.
    pub schatten_sup: f64,
    pub ratio: f64,
}

fn dual_index(p: f64) -> f64 {
    // 1/p̃ = 1/2 − 1/p
    let inv = 0.5 - 1.0 / p;
    if inv <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / inv
    }
}

fn conjugate(beta: f64) -> f64 {
    if beta == 1.0 {
        f64::INFINITY
    } else if beta.is_infinite() {
        1.0
    } else {
        beta / (beta - 1.0)
    }
}

/// Random orthonormal family in coefficient space with random weights.
fn density_trial<R: Rng>(op: &SpacetimeOperator, beta: f64, q: f64, r: f64, rng: &mut R) -> Result<f64> {
    let dim = op.matrix.ncols();
    let count = rng.gen_range(1..=dim);
    let a = DMatrix::<Complex64>::from_fn(dim, count, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let u = a.qr().q();
    // log-normal weights of random spread cover both flat and peaked ν
    let spread: f64 = rng.gen_range(0.0..3.0);
    let nu: Vec<f64> = (0..count)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            (spread * z).exp()
        })
        .collect();
    let images = &op.matrix * &u;
    let mut rho = vec![0.0; op.matrix.nrows()];
    for (j, &c) in nu.iter().enumerate() {
        for (k, v) in images.column(j).iter().enumerate() {
            rho[k] += c * v.norm_sqr();
        }
    }
    let lhs = op.mixed(&rho, q / 2.0, r / 2.0)?;
    Ok(lhs / crate::norms::sequence_norm(&nu, beta))
}

fn schatten_trial<R: Rng>(op: &SpacetimeOperator, mu: &[f64], beta: f64, qt: f64, rt: f64, rng: &mut R) -> Result<f64> {
    let rows = op.matrix.nrows();
    let spread: f64 = rng.gen_range(0.0..3.0);
    let w: Vec<Complex64> = (0..rows)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            let ph: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar((spread * z).exp(), ph)
        })
        .collect();
    let mut b = op.matrix.clone();
    for k in 0..rows {
        let s = w[k] * mu[k].sqrt();
        for c in 0..b.ncols() {
            b[(k, c)] *= s;
        }
    }
    let bp = conjugate(beta);
    let sch = schatten_norm(&OperatorMatrix::new(b), 2.0 * bp)?;
    let abs_w: Vec<f64> = w.iter().map(|v| v.norm()).collect();
    let wn = op.mixed(&abs_w, qt, rt)?;
    Ok(sch * sch / (wn * wn))
}

/// Randomized sups of both sides of the duality principle. Trial `i` draws from
/// its own seeded stream, so runs with more trials extend runs with fewer.
pub fn duality_check(op: &SpacetimeOperator, beta: f64, q: f64, r: f64, trials: usize, seed: u64) -> Result<DualityReport> {
    if !(beta >= 1.0) || !(q > 2.0) || !(r >= 2.0) || trials == 0 {
        return Err(LabError::InvalidInput("need beta >= 1, q > 2, r >= 2 and at least one trial".into()));
    }
    if op.matrix.iter().all(|v| v.norm() == 0.0) {
        return Err(LabError::InvalidInput("operator is zero".into()));
    }
    let (qt, rt) = (dual_index(q), dual_index(r));
    let mu = op.measure();
    let mut density_sup: f64 = 0.0;
    let mut schatten_sup: f64 = 0.0;
    for i in 0..trials {
        let mut rng = stream_rng(seed, &[0xd0a1, i as u64, 0]);
        density_sup = density_sup.max(density_trial(op, beta, q, r, &mut rng)?);
        let mut rng = stream_rng(seed, &[0xd0a1, i as u64, 1]);
        schatten_sup = schatten_sup.max(schatten_trial(op, &mu, beta, qt, rt, &mut rng)?);
    }
    Ok(DualityReport {
        beta,
        q,
        r,
        q_tilde: qt,
        r_tilde: rt,
        trials,
        density_sup,
        schatten_sup,
        ratio: density_sup / schatten_sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onstrichartz::family::{random_onf, FrequencyWindow};
    use crate::spectral::Grid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dual_indices() {
        assert_eq!(dual_index(4.0), 4.0);
        assert!((dual_index(6.0) - 3.0).abs() < 1e-14);
        assert!(dual_index(2.0).is_infinite());
        assert!((conjugate(4.0 / 3.0) - 4.0).abs() < 1e-14);
        assert!(conjugate(1.0).is_infinite());
    }

    #[test]
    fn one_by_one_is_exact() {
        let tau = Complex64::new(0.6, -0.8) * 1.7;
        let op = SpacetimeOperator::new(DMatrix::from_element(1, 1, tau), vec![0.0], 1, 1.0).unwrap();
        let rep = duality_check(&op, 4.0 / 3.0, 4.0, 4.0, 20, 5).unwrap();
        let t2 = tau.norm_sqr();
        assert!((rep.density_sup - t2).abs() < 1e-12 * t2);
        assert!((rep.schatten_sup - t2).abs() < 1e-12 * t2);
        assert!((rep.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_operator_is_rejected() {
        let op = SpacetimeOperator::new(DMatrix::zeros(2, 1), vec![0.0, 1.0], 1, 1.0).unwrap();
        assert!(duality_check(&op, 1.5, 4.0, 4.0, 3, 1).is_err());
    }

    #[test]
    fn isometry_beta_one_is_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = Grid::new(1, 16, 8.0).unwrap();
        let fam = random_onf(4, g, FrequencyWindow::new(0.0, 3.0).unwrap(), &mut rng).unwrap();
        let op = SpacetimeOperator::from_propagator(&fam.members, &DispersionRelation::schrodinger(), &[0.0]).unwrap();
        // at a single instant T is an isometry, so T*T = I on coefficients
        let tt = op.matrix.adjoint() * &op.matrix * Complex64::new(op.cell, 0.0);
        assert!((tt - DMatrix::<Complex64>::identity(4, 4)).iter().all(|v| v.norm() < 1e-12));
        let rep = duality_check(&op, 1.0, 4.0, 4.0, 30, 3).unwrap();
        assert!(rep.ratio.is_finite() && rep.ratio > 0.0);
    }
}
