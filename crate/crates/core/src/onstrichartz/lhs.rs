//! `‖Σ_j ν_j |U_φ Ψ(D)^{−s} f_j|²‖_{L^{q/2}_t L^{r/2}_x}` on the grid.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::OrthonormalFamily;
use crate::dispersion::DispersionRelation;
use crate::error::{LabError, Result};
use crate::norms::{lorentz_norm, time_norm, MixedNormSpec};
use crate::spectral::{multiplier, Field, Multiplier, ZeroMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Psi {
    /// `|ξ|`, for the fractional and wave equations.
    Homogeneous,
    /// `⟨ξ⟩`, for Klein–Gordon.
    Inhomogeneous,
}

impl Psi {
    /// `Ψ(D)^{power}` as a grid multiplier.
    pub fn multiplier(self, power: f64) -> Multiplier {
        match self {
            Psi::Homogeneous => Multiplier::Homogeneous { s: power },
            Psi::Inhomogeneous => Multiplier::Inhomogeneous { s: power },
        }
    }
}

/// Equispaced samples on `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

impl TimeWindow {
    pub fn new(start: f64, end: f64, samples: usize) -> Result<Self> {
        if !(end >= start) || samples == 0 || (samples == 1 && end > start) {
            return Err(LabError::InvalidInput(format!("bad time window [{start}, {end}] with {samples} samples")));
        }
        Ok(Self { start, end, samples })
    }

    pub fn times(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![self.start];
        }
        let h = (self.end - self.start) / (self.samples - 1) as f64;
        (0..self.samples).map(|i| self.start + h * i as f64).collect()
    }

    /// Same window with the midpoints added.
    pub fn refined(&self) -> Self {
        Self { samples: 2 * self.samples - 1, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzSetup {
    pub phi: DispersionRelation,
    pub q: f64,
    pub r: f64,
    /// Derivative weight: members enter as `Ψ(D)^{−s} f_j`.
    pub s: f64,
    pub psi: Psi,
    pub window: TimeWindow,
    /// Secondary index of a Lorentz `L^{q/2, p}` time norm.
    pub time_lorentz: Option<f64>,
    /// Refinement stops with an error beyond this many samples.
    pub max_samples: usize,
}

impl StrichartzSetup {
    pub fn new(phi: DispersionRelation, q: f64, r: f64, window: TimeWindow) -> Self {
        Self { phi, q, r, s: 0.0, psi: Psi::Homogeneous, window, time_lorentz: None, max_samples: MAX_TIME_SAMPLES }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q >= 2.0 && self.r >= 2.0) {
            return Err(LabError::InvalidInput(format!("(q, r) = ({}, {}) must both be >= 2", self.q, self.r)));
        }
        if !self.s.is_finite() {
            return Err(LabError::InvalidInput("s must be finite".into()));
        }
        self.norm_spec().validate()
    }

    fn norm_spec(&self) -> MixedNormSpec {
        MixedNormSpec { q: self.q / 2.0, r: self.r / 2.0, time_lorentz: self.time_lorentz }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LhsValue {
    pub value: f64,
    pub samples: usize,
    /// Relative change from the previous refinement.
    pub refinement_change: f64,
}

/// Default cap on the number of time samples.
pub const MAX_TIME_SAMPLES: usize = 4097;
pub const RESOLUTION_RTOL: f64 = 0.01;

/// `Ψ(D)^{−s}` applied to every member; the zero mode is dropped for homogeneous `Ψ` with `s > 0`.
pub fn weighted_members(family: &OrthonormalFamily, s: f64, psi: Psi) -> Result<Vec<Field>> {
    if s == 0.0 {
        return Ok(family.members.clone());
    }
    family.members.iter().map(|f| multiplier(f, psi.multiplier(-s), ZeroMode::Annihilate)).collect()
}

/// `(h^d Σ ρ^p)^{1/p}`, or the max for `p = ∞`.
pub(crate) fn real_lp(values: &[f64], cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().cloned().fold(0.0, f64::max);
    }
    (cell * values.iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
}

/// `ρ(t, ·) = Σ_j ν_j |e^{itφ(D)} f_j|²`.
pub fn density_at(members: &[Field], nu: &[f64], phi: &DispersionRelation, t: f64) -> Vec<f64> {
    let grid = members[0].grid;
    let phases: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let p = phi.profile(grid.frequency_norm(i));
            if p.is_finite() {
                Complex64::from_polar(1.0, t * p)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let mut rho = vec![0.0; grid.len()];
    for (f, &c) in members.iter().zip(nu) {
        if c == 0.0 {
            continue;
        }
        let spec: Vec<Complex64> = f.spectrum().iter().zip(&phases).map(|(a, b)| a * b).collect();
        let u = Field::from_spectrum(grid, spec).expect("grid-sized spectrum");
        for (acc, v) in rho.iter_mut().zip(&u.values) {
            *acc += c * v.norm_sqr();
        }
    }
    rho
}

fn profile_at(members: &[Field], nu: &[f64], phi: &DispersionRelation, times: &[f64], r_half: f64) -> Vec<f64> {
    let cell = members[0].grid.cell_volume();
    times.par_iter().map(|&t| real_lp(&density_at(members, nu, phi, t), cell, r_half)).collect()
}

/// The mixed norm of the density, refining the time window until a doubling of
/// the samples changes the value by less than 1%.
pub fn strichartz_lhs(family: &OrthonormalFamily, setup: &StrichartzSetup) -> Result<LhsValue> {
    setup.validate()?;
    let members = weighted_members(family, setup.s, setup.psi)?;
    let spec = setup.norm_spec();
    let mut window = setup.window;
    let mut times = window.times();
    let mut profile = profile_at(&members, &family.nu, &setup.phi, &times, spec.r);
    let mut value = time_norm(&profile, &times, &spec)?;
    if window.samples == 1 {
        return Ok(LhsValue { value, samples: 1, refinement_change: 0.0 });
    }
    loop {
        let fine = window.refined();
        if fine.samples > setup.max_samples {
            return Err(LabError::Numerical(format!(
                "time window unresolved at {} samples",
                window.samples
            )));
        }
        let fine_times = fine.times();
        let mids: Vec<f64> = fine_times.iter().skip(1).step_by(2).cloned().collect();
        let mid_profile = profile_at(&members, &family.nu, &setup.phi, &mids, spec.r);
        let mut merged = Vec::with_capacity(fine.samples);
        for (i, p) in profile.iter().enumerate() {
            merged.push(*p);
            if i < mid_profile.len() {
                merged.push(mid_profile[i]);
            }
        }
        let fine_value = time_norm(&merged, &fine_times, &spec)?;
        let change = if fine_value == 0.0 { 0.0 } else { (fine_value - value).abs() / fine_value };
        window = fine;
        times = fine_times;
        profile = merged;
        value = fine_value;
        if change < RESOLUTION_RTOL {
            debug_assert_eq!(times.len(), window.samples);
            return Ok(LhsValue { value, samples: window.samples, refinement_change: change });
        }
    }
}

/// `‖Σ ν_j |Ψ(D)^{−d/(2p′)} f_j|²‖_{L^p} / ‖ν‖_{ℓ^{p,1}}`.
pub fn lieb_sobolev_ratio(family: &OrthonormalFamily, p: f64, psi: Psi) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(LabError::InvalidInput(format!("p = {p} must lie in (1, ∞)")));
    }
    let grid = family.grid();
    let p_dual = p / (p - 1.0);
    let s = grid.d as f64 / (2.0 * p_dual);
    let members = weighted_members(family, s, psi)?;
    let rho = density_at(&members, &family.nu, &DispersionRelation::Wave, 0.0);
    let lhs = real_lp(&rho, grid.cell_volume(), p);
    let abs_nu: Vec<f64> = family.nu.iter().map(|v| v.abs()).collect();
    let rhs = lorentz_norm(&abs_nu, &vec![1.0; abs_nu.len()], p, 1.0)?;
    if rhs == 0.0 {
        return Err(LabError::InvalidInput("coefficient sequence is zero".into()));
    }
    Ok(lhs / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::mixed_norm;
    use crate::onstrichartz::family::{random_onf, FrequencyWindow};
    use crate::spectral::{Grid, SpacetimeField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn family(count: usize, seed: u64) -> OrthonormalFamily {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Grid::new(1, 64, 12.0).unwrap();
        random_onf(count, g, FrequencyWindow::new(0.3, 3.0).unwrap(), &mut rng).unwrap()
    }

    fn setup(q: f64, r: f64) -> StrichartzSetup {
        StrichartzSetup::new(DispersionRelation::schrodinger(), q, r, TimeWindow::new(0.0, 1.0, 33).unwrap())
    }

    #[test]
    fn single_member_matches_classical_functional() {
        let f = family(1, 10);
        let st = setup(6.0, 6.0);
        let v = strichartz_lhs(&f, &st).unwrap();
        let w = TimeWindow { samples: v.samples, ..st.window };
        let u = SpacetimeField::evolve(&f.members[0], &st.phi, &w.times()).unwrap();
        let classical = mixed_norm(&u, &MixedNormSpec::new(6.0, 6.0)).unwrap();
        assert!((v.value - classical * classical).abs() < 1e-10 * v.value);
    }

    #[test]
    fn mass_conservation_endpoint() {
        let f = family(7, 11).with_nu(vec![0.5, 1.0, 2.0, 0.25, 3.0, 1.5, 0.1]).unwrap();
        let v = strichartz_lhs(&f, &setup(f64::INFINITY, 2.0)).unwrap();
        assert!((v.value - 8.35).abs() < 1e-10, "{}", v.value);
    }

    #[test]
    fn homogeneous_in_nu() {
        let f = family(5, 12);
        let st = setup(4.0, 4.0);
        let a = strichartz_lhs(&f, &st).unwrap().value;
        let f3 = f.clone().with_nu(vec![3.0; 5]).unwrap();
        let b = strichartz_lhs(&f3, &st).unwrap().value;
        assert!((b - 3.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn invariant_under_diagonal_unitary() {
        // e^{ic}e^{−ia·ξ} with a a multiple of the spacing: a translation times a phase
        let f = family(5, 13);
        let grid = f.grid();
        let a = 7.0 * grid.spacing();
        let moved: Vec<Field> = f
            .members
            .iter()
            .map(|m| m.apply_diagonal(|i| Complex64::from_polar(1.0, 0.3 - a * grid.frequency(i)[0])))
            .collect();
        let g = OrthonormalFamily::new(moved, f.nu.clone(), f.mechanism).unwrap();
        let st = setup(4.0, 6.0);
        let x = strichartz_lhs(&f, &st).unwrap().value;
        let y = strichartz_lhs(&g, &st).unwrap().value;
        assert!((x - y).abs() < 1e-10 * x);
    }

    #[test]
    fn lieb_ratio_single_mode() {
        // one plane wave on a box of length 2π at |ξ| = 1: ρ ≡ 1/(2π)
        let g = Grid::new(1, 16, 2.0 * std::f64::consts::PI).unwrap();
        let f = Field::from_fn(g, |x| Complex64::from_polar(1.0 / (2.0 * std::f64::consts::PI).sqrt(), x[0]));
        let fam = OrthonormalFamily::new(vec![f], vec![1.0], super::super::family::Orthogonality::Supplied).unwrap();
        for p in [1.5, 2.0, 3.0] {
            // ‖(1)‖_{ℓ^{p,1}} = ∫₀¹ t^{1/p} dt/t = p
            let expected = (2.0 * std::f64::consts::PI).powf(1.0 / p - 1.0) / p;
            let got = lieb_sobolev_ratio(&fam, p, Psi::Homogeneous).unwrap();
            assert!((got - expected).abs() < 1e-12, "p={p}: {got} vs {expected}");
        }
    }

    #[test]
    fn unresolved_window_is_reported() {
        let f = family(3, 14);
        let st = StrichartzSetup {
            window: TimeWindow::new(0.0, 50.0, 3).unwrap(),
            max_samples: 9,
            ..setup(4.0, f64::INFINITY)
        };
        assert!(matches!(strichartz_lhs(&f, &st), Err(LabError::Numerical(_))));
    }
}
