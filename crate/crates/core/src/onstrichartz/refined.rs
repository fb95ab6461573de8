//! `‖U_φ f‖_{L^q_t L^r_x}` against `(Σ_j ‖P_j f‖_{Ḣ^s}^{2β})^{1/(2β)}`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::family::{OrthonormalFamily, Orthogonality};
use super::lhs::{strichartz_lhs, StrichartzSetup, TimeWindow};
use super::stream_rng;
use crate::dispersion::DispersionRelation;
use crate::error::{LabError, Result};
use crate::norms::sequence_norm;
use crate::oscillatory::bump::annulus_bump;
use crate::spectral::{littlewood_paley, Field, Grid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `(j, ‖P_j f‖_{Ḣ^s})` for the shells that carry mass.
    pub shells: Vec<(i32, f64)>,
    /// The `β = 1` right side, `(Σ_j ‖P_j f‖²_{Ḣ^s})^{1/2}`.
    pub rhs_beta_one: f64,
    /// `rhs_beta_one / rhs`.
    pub gain: f64,
    /// `Σ_j ‖U_φ P_j f‖_{L^q L^r}`, which dominates `lhs` by the triangle inequality.
    pub triangle: f64,
    /// Per shell, `‖U_φ P_j f‖ / ‖P_j f‖_{Ḣ^s}`.
    pub shell_ratios: Vec<f64>,
    /// Largest normalized `Ḣ^s` inner product between distinct shells of equal parity.
    pub parity_defect: f64,
}

/// `‖ |D|^s g ‖₂` from the spectrum.
fn hdot_norm(g: &Field, s: f64) -> f64 {
    let grid = g.grid;
    let sum: f64 = g
        .spectrum()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let rho = grid.frequency_norm(i);
            if rho == 0.0 {
                0.0
            } else {
                rho.powf(2.0 * s) * v.norm_sqr()
            }
        })
        .sum();
    (sum / grid.volume()).sqrt()
}

fn hdot_inner(a: &Field, b: &Field, s: f64) -> Complex64 {
    let grid = a.grid;
    let sum: Complex64 = a
        .spectrum()
        .iter()
        .zip(b.spectrum())
        .enumerate()
        .map(|(i, (x, y))| {
            let rho = grid.frequency_norm(i);
            if rho == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                x * y.conj() * rho.powf(2.0 * s)
            }
        })
        .sum();
    sum / grid.volume()
}

fn strichartz_norm(f: &Field, phi: &DispersionRelation, q: f64, r: f64, window: TimeWindow) -> Result<f64> {
    let fam = OrthonormalFamily {
        members: vec![f.clone()],
        nu: vec![1.0],
        gram_defect: 0.0,
        mechanism: Orthogonality::Supplied,
    };
    let setup = StrichartzSetup::new(phi.clone(), q, r, window);
    Ok(strichartz_lhs(&fam, &setup)?.value.sqrt())
}

/// Both sides of the refined bound, plus the parity-class orthogonality and the
/// triangle chain for the shell decomposition.
pub fn refined_strichartz_check(
    f: &Field,
    phi: &DispersionRelation,
    q: f64,
    r: f64,
    beta: f64,
    s: f64,
    window: TimeWindow,
) -> Result<RefinedReport> {
    if !(beta >= 1.0) {
        return Err(LabError::InvalidInput(format!("beta = {beta} must be >= 1")));
    }
    let mut pieces = Vec::new();
    let total = hdot_norm(f, s);
    if total == 0.0 {
        return Err(LabError::InvalidInput("datum has no homogeneous mass".into()));
    }
    for j in f.grid.lp_full_range() {
        let p = littlewood_paley(f, j);
        let n = hdot_norm(&p, s);
        if n > 1e-14 * total {
            pieces.push((j, p, n));
        }
    }
    let norms: Vec<f64> = pieces.iter().map(|p| p.2).collect();
    let rhs = sequence_norm(&norms, 2.0 * beta);
    let rhs_beta_one = sequence_norm(&norms, 2.0);
    let lhs = strichartz_norm(f, phi, q, r, window)?;
    let mut triangle = 0.0;
    let mut shell_ratios = Vec::new();
    for (_, p, n) in &pieces {
        let v = strichartz_norm(p, phi, q, r, window)?;
        triangle += v;
        shell_ratios.push(v / n);
    }
    let mut parity_defect: f64 = 0.0;
    for a in 0..pieces.len() {
        for b in a + 1..pieces.len() {
            let (ja, pa, na) = &pieces[a];
            let (jb, pb, nb) = &pieces[b];
            if (ja - jb).rem_euclid(2) == 0 {
                parity_defect = parity_defect.max(hdot_inner(pa, pb, s).norm() / (na * nb));
            }
        }
    }
    Ok(RefinedReport {
        lhs,
        rhs,
        ratio: lhs / rhs,
        shells: pieces.iter().map(|p| (p.0, p.2)).collect(),
        rhs_beta_one,
        gain: rhs_beta_one / rhs,
        triangle,
        shell_ratios,
        parity_defect,
    })
}

/// Random multi-shell data: Gaussian spectra on two to four distinct shells
/// `j ∈ [0, 5]`, each rescaled by a random `Ḣ^s` mass.
pub fn random_multishell(grid: Grid, s: f64, seed: u64, index: u64) -> Result<Field> {
    let mut rng = stream_rng(seed, &[0x5e11, index]);
    let count = rng.gen_range(2..=4);
    let mut shells: Vec<i32> = Vec::new();
    while shells.len() < count {
        let j = rng.gen_range(0..=5);
        if !shells.contains(&j) {
            shells.push(j);
        }
    }
    let mut acc = Field::zeros(grid);
    for &j in &shells {
        let scale = 2f64.powi(-j);
        let spec: Vec<Complex64> = (0..grid.len())
            .map(|i| {
                let w = annulus_bump(scale * grid.frequency_norm(i));
                if w == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * w
            })
            .collect();
        let piece = Field::from_spectrum(grid, spec)?;
        let mass: f64 = rng.gen_range(0.1..1.0);
        let n = hdot_norm(&piece, s);
        acc = acc.add(&piece.scale(Complex64::new(mass / n, 0.0)));
    }
    Ok(acc)
}

/// The refined check on `count` random data, each reproducible from `(seed, index)`.
#[allow(clippy::too_many_arguments)]
pub fn refined_corpus(
    grid: Grid,
    phi: &DispersionRelation,
    q: f64,
    r: f64,
    beta: f64,
    s: f64,
    window: TimeWindow,
    count: usize,
    seed: u64,
) -> Result<Vec<RefinedReport>> {
    (0..count as u64)
        .map(|i| {
            let f = random_multishell(grid, s, seed, i)?;
            refined_strichartz_check(&f, phi, q, r, beta, s, window)
        })
        .collect()
}
