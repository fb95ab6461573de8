//! Orthonormal families: QR-random, the frequency lattice and time translates.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dispersion::DispersionRelation;
use crate::error::{LabError, Result};
use crate::oscillatory::bessel::sphere_area;
use crate::oscillatory::bump::smooth_bump;
use crate::oscillatory::rules::gl16;
use crate::spectral::{Field, Grid};

/// Why the members are orthogonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orthogonality {
    Qr,
    DisjointSupports,
    /// `∫|ĝ|² e^{−imφ} = 0` after the change of variables `u = φ₀(|ξ|)`.
    TimeTranslatePhase,
    Supplied,
}

#[derive(Debug, Clone)]
pub struct OrthonormalFamily {
    pub members: Vec<Field>,
    pub nu: Vec<f64>,
    /// `max |G − I|` over the measured Gram matrix.
    pub gram_defect: f64,
    pub mechanism: Orthogonality,
}

impl OrthonormalFamily {
    pub fn new(members: Vec<Field>, nu: Vec<f64>, mechanism: Orthogonality) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(LabError::InvalidInput("empty family".into()));
        };
        if members.iter().any(|m| m.grid != first.grid) {
            return Err(LabError::InvalidInput("family members live on different grids".into()));
        }
        if nu.len() != members.len() {
            return Err(LabError::InvalidInput(format!("{} coefficients for {} members", nu.len(), members.len())));
        }
        if nu.iter().any(|v| !v.is_finite()) {
            return Err(LabError::InvalidInput("coefficients must be finite".into()));
        }
        let g = gram_matrix(&members);
        let gram_defect = defect(&g);
        Ok(Self { members, nu, gram_defect, mechanism })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn grid(&self) -> Grid {
        self.members[0].grid
    }

    pub fn with_nu(mut self, nu: Vec<f64>) -> Result<Self> {
        if nu.len() != self.members.len() || nu.iter().any(|v| !v.is_finite()) {
            return Err(LabError::InvalidInput("coefficient sequence does not fit the family".into()));
        }
        self.nu = nu;
        Ok(self)
    }

    pub fn gram(&self) -> DMatrix<Complex64> {
        gram_matrix(&self.members)
    }
}

/// `G_{jk} = ⟨f_k, f_j⟩`.
pub fn gram_matrix(members: &[Field]) -> DMatrix<Complex64> {
    let n = members.len();
    let mut g = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let v = members[k].inner(&members[j]);
            g[(j, k)] = v;
            g[(k, j)] = v.conj();
        }
    }
    g
}

fn defect(g: &DMatrix<Complex64>) -> f64 {
    let mut m: f64 = 0.0;
    for j in 0..g.nrows() {
        for k in 0..g.ncols() {
            let target = if j == k { 1.0 } else { 0.0 };
            m = m.max((g[(j, k)] - target).norm());
        }
    }
    m
}

/// Closed band `lo ≤ |ξ| ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FrequencyWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && hi >= lo) {
            return Err(LabError::InvalidInput(format!("bad frequency window [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, rho: f64) -> bool {
        // half a step of slack so that window edges placed on grid frequencies count
        let tol = 1e-9 * self.hi.max(1.0);
        rho >= self.lo - tol && rho <= self.hi + tol
    }

    pub fn modes(&self, grid: &Grid) -> Vec<usize> {
        (0..grid.len()).filter(|&i| self.contains(grid.frequency_norm(i))).collect()
    }
}

/// QR-orthonormalized complex Gaussian fields with spectrum inside `window`; `ν ≡ 1`.
pub fn random_onf<R: Rng + ?Sized>(count: usize, grid: Grid, window: FrequencyWindow, rng: &mut R) -> Result<OrthonormalFamily> {
    let modes = window.modes(&grid);
    if count == 0 || count > modes.len() {
        return Err(LabError::InvalidInput(format!(
            "count {count} exceeds the {} grid modes in the window",
            modes.len()
        )));
    }
    let dim = modes.len();
    let a = DMatrix::<Complex64>::from_fn(dim, count, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let q = a.qr().q();
    let scale = grid.volume().sqrt();
    let mut members = Vec::with_capacity(count);
    for j in 0..count {
        let mut spec = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (m, &idx) in modes.iter().enumerate() {
            spec[idx] = q[(m, j)] * scale;
        }
        members.push(Field::from_spectrum(grid, spec)?);
    }
    OrthonormalFamily::new(members, vec![1.0; count], Orthogonality::Qr)
}

/// `R^{−1}ℤ^d ∩ {1/2 ≤ |ξ| ≤ 2}`, enumerated on integers.
pub fn lattice_points(scale: usize, d: usize) -> Vec<[f64; 3]> {
    let r = scale as i64;
    let r2 = r * r;
    let mut out = Vec::new();
    let range = -2 * r..=2 * r;
    let mut visit = |k: [i64; 3]| {
        let n2: i64 = k.iter().map(|v| v * v).sum();
        if 4 * n2 >= r2 && n2 <= 4 * r2 {
            let mut v = [0.0; 3];
            for a in 0..3 {
                v[a] = k[a] as f64 / r as f64;
            }
            out.push(v);
        }
    };
    match d {
        1 => range.for_each(|a| visit([a, 0, 0])),
        2 => {
            for a in range.clone() {
                for b in range.clone() {
                    visit([a, b, 0]);
                }
            }
        }
        _ => {
            for a in range.clone() {
                for b in range.clone() {
                    for c in range.clone() {
                        visit([a, b, c]);
                    }
                }
            }
        }
    }
    out
}

/// `c` with `‖c R^{d/2} χ(2R|· − v|)^∨‖₂ = 1`, independent of `R`.
pub fn lattice_bump_constant(d: usize) -> f64 {
    let (x, w) = gl16();
    // χ = 1 on [0, 1/2]; smooth transition on [1/2, 1]
    let mut moment = 0.5f64.powi(d as i32) / d as f64;
    let panels = 16;
    for p in 0..panels {
        let a = 0.5 + 0.5 * p as f64 / panels as f64;
        let h = 0.5 / panels as f64;
        for (xi, wi) in x.iter().zip(w) {
            let u = a + 0.5 * h * (xi + 1.0);
            moment += 0.5 * h * wi * smooth_bump(u).powi(2) * u.powi(d as i32 - 1);
        }
    }
    let integral = sphere_area(d as u32) * moment * 0.5f64.powi(d as i32);
    ((2.0 * PI).powi(d as i32) / integral).sqrt()
}

/// Bumps `f̂_j = c R^{d/2} χ(2R|ξ − v_j|)` at the lattice points, `ν ≡ 1`, with `c`
/// fixed by the grid norm of each member.
pub fn counterexample_lattice(scale: usize, d: usize, grid: Grid) -> Result<OrthonormalFamily> {
    if scale < 2 {
        return Err(LabError::InvalidInput("lattice scale R must be at least 2".into()));
    }
    if grid.d != d {
        return Err(LabError::InvalidInput("grid dimension does not match d".into()));
    }
    let r = scale as f64;
    let axis_max = 0.5 * grid.n as f64 * grid.frequency_step();
    if grid.frequency_step() > 1.0 / (8.0 * r) || axis_max < 2.0 + 1.0 / (2.0 * r) {
        return Err(LabError::InvalidInput(format!(
            "grid too coarse for R = {scale}: need frequency step <= {:.3e} and axis range >= {:.3}",
            1.0 / (8.0 * r),
            2.0 + 1.0 / (2.0 * r)
        )));
    }
    let pts = lattice_points(scale, d);
    let mut members = Vec::with_capacity(pts.len());
    for v in &pts {
        // the bump has only a few samples across its transition, so c is fixed on the grid
        let spec: Vec<Complex64> = (0..grid.len())
            .map(|i| {
                let xi = grid.frequency(i);
                let dist = xi[..d].iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                Complex64::new(smooth_bump(2.0 * r * dist), 0.0)
            })
            .collect();
        let mass = (spec.iter().map(|z| z.norm_sqr()).sum::<f64>() / grid.volume()).sqrt();
        if mass == 0.0 {
            return Err(LabError::InvalidInput("bump falls between grid frequencies".into()));
        }
        members.push(Field::from_spectrum(grid, spec.iter().map(|z| z / mass).collect())?);
    }
    let n = members.len();
    OrthonormalFamily::new(members, vec![1.0; n], Orthogonality::DisjointSupports)
}

fn invert_profile(phi: &DispersionRelation, y: f64) -> Result<f64> {
    let mut hi = 1.0;
    let mut guard = 0;
    while phi.profile(hi) < y {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(LabError::Numerical(format!("profile never reaches {y}")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi.profile(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `{ρ ≥ 0 : φ₀(ρ) ∈ [ℓπ, (ℓ+2)π]}` as an interval.
pub fn time_translate_shell(phi: &DispersionRelation, ell: i64) -> Result<(f64, f64)> {
    let base = phi.profile(0.0);
    if !base.is_finite() {
        return Err(LabError::InvalidInput("profile must be finite at the origin".into()));
    }
    let (ya, yb) = (ell as f64 * PI, (ell + 2) as f64 * PI);
    if ya < base - 1e-12 {
        return Err(LabError::InvalidInput(format!(
            "phase range [{ya:.4}, {yb:.4}] starts below phi(0) = {base:.4}; no full period"
        )));
    }
    let lo = if ya <= base { 0.0 } else { invert_profile(phi, ya)? };
    let hi = invert_profile(phi, yb)?;
    let probe = 64;
    for i in 1..probe {
        let rho = lo + (hi - lo) * i as f64 / probe as f64;
        if !(phi.d1(rho) > 0.0) {
            return Err(LabError::InvalidInput("profile is not increasing on the shell".into()));
        }
    }
    if hi < 0.5 || lo > 2.0 {
        return Err(LabError::InvalidInput(format!("shell [{lo:.4}, {hi:.4}] misses 1/2 <= |xi| <= 2")));
    }
    Ok((lo, hi))
}

/// One-dimensional grid of `n` points on which the outer shell edge is a grid
/// frequency sitting at a quarter of the axis range.
pub fn time_translate_grid(n: usize, phi: &DispersionRelation, ell: i64) -> Result<Grid> {
    let (_, a) = time_translate_shell(phi, ell)?;
    Grid::new(1, n, PI * n as f64 / (2.0 * a))
}

/// `f_j = c e^{−ijφ(D)}g`, `j = 1..=count`, with
/// `ĝ = 1_{shell}(|ξ|)|ξ|^{−(d−1)/2}φ₀′(|ξ|)^{1/2}`. `|ĝ|²` carries the fraction of
/// each frequency cell inside the shell, which is the trapezoid half weight on aligned edges.
pub fn counterexample_time_translates(
    count: usize,
    phi: &DispersionRelation,
    ell: i64,
    grid: Grid,
    nu: Vec<f64>,
) -> Result<OrthonormalFamily> {
    if count == 0 {
        return Err(LabError::InvalidInput("need at least one member".into()));
    }
    let g = time_translate_profile(phi, ell, grid)?;
    let mut members = Vec::with_capacity(count);
    for j in 1..=count {
        let spec: Vec<Complex64> = g
            .spectrum()
            .iter()
            .enumerate()
            .map(|(i, v)| v * Complex64::from_polar(1.0, -(j as f64) * phi.profile(grid.frequency_norm(i))))
            .collect();
        members.push(Field::from_spectrum(grid, spec)?);
    }
    OrthonormalFamily::new(members, nu, Orthogonality::TimeTranslatePhase)
}

/// Normalized generator `g` of the time-translate family.
pub fn time_translate_profile(phi: &DispersionRelation, ell: i64, grid: Grid) -> Result<Field> {
    let (lo, hi) = time_translate_shell(phi, ell)?;
    let step = grid.frequency_step();
    if hi - lo < 4.0 * step {
        return Err(LabError::InvalidInput("grid does not resolve the shell".into()));
    }
    let d = grid.d as f64;
    let spec: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let rho = grid.frequency_norm(i);
            let overlap = ((rho + 0.5 * step).min(hi) - (rho - 0.5 * step).max(lo)).max(0.0) / step;
            if overlap == 0.0 || rho == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new(overlap.sqrt() * rho.powf(-(d - 1.0) / 2.0) * phi.d1(rho).sqrt(), 0.0)
        })
        .collect();
    let g = Field::from_spectrum(grid, spec)?;
    let norm = g.l2_norm_from_spectrum();
    if norm == 0.0 {
        return Err(LabError::InvalidInput("empty shell on this grid".into()));
    }
    let scaled: Vec<Complex64> = g.spectrum().iter().map(|v| v / norm).collect();
    Field::from_spectrum(grid, scaled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid1(n: usize, l: f64) -> Grid {
        Grid::new(1, n, l).unwrap()
    }

    #[test]
    fn single_random_member_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_onf(1, grid1(64, 10.0), FrequencyWindow::new(0.0, 5.0).unwrap(), &mut rng).unwrap();
        assert!((f.members[0].l2_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_gram_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = Grid::new(2, 16, 6.0).unwrap();
        let f = random_onf(16, g, FrequencyWindow::new(1.0, 4.0).unwrap(), &mut rng).unwrap();
        assert!(f.gram_defect < 1e-10, "{}", f.gram_defect);
    }

    #[test]
    fn disjoint_windows_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = grid1(128, 20.0);
        let a = random_onf(5, g, FrequencyWindow::new(0.0, 2.0).unwrap(), &mut rng).unwrap();
        let b = random_onf(5, g, FrequencyWindow::new(2.5, 6.0).unwrap(), &mut rng).unwrap();
        for x in &a.members {
            for y in &b.members {
                assert!(x.inner(y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn count_above_window_dimension_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = grid1(64, 2.0 * PI);
        // modes 0, ±1, ±2
        assert!(random_onf(6, g, FrequencyWindow::new(0.0, 2.0).unwrap(), &mut rng).is_err());
        assert!(random_onf(5, g, FrequencyWindow::new(0.0, 2.0).unwrap(), &mut rng).is_ok());
    }

    #[test]
    fn lattice_count_matches_direct_enumeration() {
        let pts = lattice_points(8, 2);
        let mut count = 0;
        for a in -20i32..=20 {
            for b in -20i32..=20 {
                let r = ((a * a + b * b) as f64).sqrt() / 8.0;
                if (0.5..=2.0).contains(&r) {
                    count += 1;
                }
            }
        }
        assert_eq!(pts.len(), count);
        assert_eq!(lattice_points(8, 1).len(), 2 * (16 - 4 + 1));
    }

    #[test]
    fn lattice_family_is_orthonormal() {
        let r = 4;
        let g = grid1(1024, 32.0 * PI * r as f64);
        let f = counterexample_lattice(r, 1, g).unwrap();
        assert_eq!(f.len(), lattice_points(r, 1).len());
        assert!(f.gram_defect < 1e-12, "{}", f.gram_defect);
    }

    #[test]
    fn lattice_rejects_coarse_grid() {
        assert!(counterexample_lattice(8, 1, grid1(256, 40.0)).is_err());
    }

    #[test]
    fn lattice_lower_bound_on_the_core() {
        let phi = DispersionRelation::schrodinger();
        for r in [4usize, 8] {
            let g = grid1(2048, 32.0 * PI * r as f64);
            let f = counterexample_lattice(r, 1, g).unwrap();
            let rr = r as f64;
            let mut worst = f64::INFINITY;
            for m in [0, f.len() / 3, f.len() - 1] {
                for t in [-rr / 16.0, 0.0, rr / 16.0] {
                    let u = crate::spectral::propagate(&f.members[m], &phi, t);
                    for (i, v) in u.values.iter().enumerate() {
                        if g.coord(i).abs() <= rr / 16.0 {
                            worst = worst.min(v.norm() * rr.sqrt());
                        }
                    }
                }
            }
            assert!(worst > 0.1, "R={r}: {worst}");
        }
    }

    #[test]
    fn time_translate_shell_for_schrodinger() {
        let phi = DispersionRelation::schrodinger();
        let (lo, hi) = time_translate_shell(&phi, 0).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!(time_translate_shell(&phi, 3).is_err());
        assert!(time_translate_shell(&DispersionRelation::KleinGordon, 0).is_err());
    }

    #[test]
    fn time_translate_members_are_unit_and_orthogonal() {
        let phi = DispersionRelation::schrodinger();
        let g = time_translate_grid(65536, &phi, 0).unwrap();
        let f = counterexample_time_translates(16, &phi, 0, g, vec![1.0; 16]).unwrap();
        for m in &f.members {
            assert!((m.l2_norm() - 1.0).abs() < 1e-10);
        }
        assert!(f.gram_defect <= 1e-6, "{}", f.gram_defect);
    }
}
