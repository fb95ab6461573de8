//! Mixed Lebesgue, Lorentz, Besov and Schatten norms, and operator densities.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::oscillatory::bump::dyadic_piece;
use crate::oscillatory::smooth_bump;
use crate::spectral::{littlewood_paley, lp_low, Field, Grid, SpacetimeField};

/// Which functional of the rearrangement to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LorentzVariant {
    /// The quasi-norm built from `f*`.
    #[default]
    Rearrangement,
    /// The norm built from the average `f**(t) = t⁻¹∫_0^t f*`.
    Averaged,
}

/// `‖f‖_{L^{p,r}}` of the step function taking value `|samples[i]|` on a set of measure `weights[i]`.
///
/// `(∫_0^∞ (t^{1/p} f*(t))^r dt/t)^{1/r}`, exact per step; `r = ∞` gives `sup t^{1/p} f*(t)`.
pub fn lorentz_norm(samples: &[f64], weights: &[f64], p: f64, r: f64) -> Result<f64> {
    lorentz_norm_with(samples, weights, p, r, LorentzVariant::Rearrangement)
}

pub fn lorentz_norm_with(samples: &[f64], weights: &[f64], p: f64, r: f64, variant: LorentzVariant) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(LabError::InvalidInput(format!("Lorentz index p = {p} must lie in (1, ∞)")));
    }
    if !(r >= 1.0) {
        return Err(LabError::InvalidInput(format!("Lorentz index r = {r} must be at least 1")));
    }
    if samples.len() != weights.len() {
        return Err(LabError::InvalidInput("samples and weights differ in length".into()));
    }
    if weights.iter().any(|w| !(*w > 0.0)) {
        return Err(LabError::InvalidInput("weights must be positive".into()));
    }
    let mut steps: Vec<(f64, f64)> =
        samples.iter().zip(weights).map(|(a, w)| (a.abs(), *w)).filter(|(a, _)| *a > 0.0).collect();
    steps.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    Ok(match variant {
        LorentzVariant::Rearrangement => rearrangement_norm(&steps, p, r),
        LorentzVariant::Averaged => averaged_norm(&steps, p, r),
    })
}

fn rearrangement_norm(steps: &[(f64, f64)], p: f64, r: f64) -> f64 {
    let mut m = 0.0;
    if r.is_infinite() {
        let mut best: f64 = 0.0;
        for &(a, w) in steps {
            m += w;
            best = best.max(a * m.powf(1.0 / p));
        }
        return best;
    }
    let e = r / p;
    let mut acc = 0.0;
    for &(a, w) in steps {
        let next = m + w;
        acc += a.powf(r) * (next.powf(e) - m.powf(e)) / e;
        m = next;
    }
    acc.powf(1.0 / r)
}

/// On a step `[m, m+w)` of height `a`, `f**(t) = a + c/t` with `c = S − a·m ≥ 0`.
/// `t^{1/p}(a + c/t)` has no interior maximum, so the `r = ∞` sup sits at step ends.
fn averaged_norm(steps: &[(f64, f64)], p: f64, r: f64) -> f64 {
    let (x, w) = crate::oscillatory::rules::gl16();
    let mut m = 0.0;
    let mut s = 0.0;
    let mut acc: f64 = 0.0;
    for &(a, width) in steps {
        let c = s - a * m;
        let g = |t: f64| t.powf(1.0 / p) * (a + c / t);
        let (lo, hi) = (m, m + width);
        if r.is_infinite() {
            acc = acc.max(g(hi));
            if lo > 0.0 {
                acc = acc.max(g(lo));
            }
        } else if lo == 0.0 {
            // f** = a on the first step
            acc += a.powf(r) * hi.powf(r / p) * p / r;
        } else {
            // t = e^u turns dt/t into du; eight Gauss panels per step
            let (ul, uh) = (lo.ln(), hi.ln());
            let h = 0.5 * (uh - ul) / 8.0;
            for k in 0..8 {
                let mid = ul + (2 * k + 1) as f64 * h;
                for (xi, wi) in x.iter().zip(w) {
                    acc += wi * h * g((mid + h * xi).exp()).powf(r);
                }
            }
        }
        s += a * width;
        m = hi;
    }
    if s == 0.0 {
        return 0.0;
    }
    // beyond the support f** = S/t
    if r.is_infinite() {
        acc.max(s * m.powf(1.0 / p - 1.0))
    } else {
        let e = r - r / p;
        (acc + s.powf(r) * m.powf(-e) / e).powf(1.0 / r)
    }
}

/// Exponents of `L^{q}_t L^r_x`, or `L^{q,p}_t L^r_x` when `time_lorentz = Some(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedNormSpec {
    pub q: f64,
    pub r: f64,
    pub time_lorentz: Option<f64>,
}

impl MixedNormSpec {
    pub fn new(q: f64, r: f64) -> Self {
        Self { q, r, time_lorentz: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q >= 1.0 && self.r >= 1.0) {
            return Err(LabError::InvalidInput(format!("mixed norm exponents ({}, {}) must be >= 1", self.q, self.r)));
        }
        if let Some(p) = self.time_lorentz {
            if !(p >= 1.0) {
                return Err(LabError::InvalidInput(format!("secondary Lorentz index {p} must be >= 1")));
            }
        }
        Ok(())
    }
}

/// Composite trapezoid weights; a single instant gets weight 1.
pub fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let n = times.len();
    if n == 1 {
        return vec![1.0];
    }
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = times[i + 1] - times[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Time norm of a profile `g(t_i) = ‖u(t_i)‖_{L^r_x}`.
pub fn time_norm(profile: &[f64], times: &[f64], spec: &MixedNormSpec) -> Result<f64> {
    spec.validate()?;
    if profile.is_empty() || profile.len() != times.len() {
        return Err(LabError::InvalidInput("empty or mismatched time grid".into()));
    }
    if spec.q.is_infinite() {
        return Ok(profile.iter().cloned().fold(0.0, f64::max));
    }
    let w = trapezoid_weights(times);
    match spec.time_lorentz {
        Some(p) => {
            // zero trapezoid weights cannot occur for strictly increasing times
            lorentz_norm(profile, &w, spec.q, p)
        }
        None => Ok(profile.iter().zip(&w).map(|(g, w)| w * g.abs().powf(spec.q)).sum::<f64>().powf(1.0 / spec.q)),
    }
}

/// `‖ ‖u(t,·)‖_{L^r_x} ‖_{L^q_t}` with trapezoid weights in time and cell weights in space.
pub fn mixed_norm(u: &SpacetimeField, spec: &MixedNormSpec) -> Result<f64> {
    spec.validate()?;
    let profile: Vec<f64> = u.slices.iter().map(|s| s.lebesgue_norm(spec.r)).collect();
    time_norm(&profile, &u.times, spec)
}

/// Besov-type norm `(Σ_j (2^{js}‖P_j f‖₂)^{2β})^{1/(2β)}` over the grid's dyadic range.
/// The inhomogeneous form replaces `j ≤ 0` by `‖P_{≤0} f‖₂`.
pub fn besov_norm(f: &Field, s: f64, beta: f64, homogeneous: bool) -> Result<f64> {
    if !(beta >= 1.0) {
        return Err(LabError::InvalidInput(format!("beta = {beta} must be >= 1")));
    }
    let mut terms = Vec::new();
    if homogeneous {
        for j in f.grid.lp_full_range() {
            terms.push(2f64.powf(j as f64 * s) * littlewood_paley(f, j).l2_norm());
        }
    } else {
        terms.push(lp_low(f).l2_norm());
        for j in f.grid.lp_high_range() {
            terms.push(2f64.powf(j as f64 * s) * littlewood_paley(f, j).l2_norm());
        }
    }
    Ok(sequence_norm(&terms, 2.0 * beta))
}

/// `ℓ^p` norm of a nonnegative sequence, scaled against overflow.
pub fn sequence_norm(terms: &[f64], p: f64) -> f64 {
    let top = terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return top;
    }
    top * terms.iter().map(|t| (t.abs() / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Range of `P_{≤0}² + Σ_{j≥1} P_j²` symbols over the grid frequencies; the inhomogeneous
/// `β = 1, s = 0` Besov norm lies between `√lo·‖f‖₂` and `√hi·‖f‖₂`.
pub fn lp_overlap_bounds(grid: &Grid) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for i in 0..grid.len() {
        let rho = grid.frequency_norm(i);
        let mut s = smooth_bump(0.5 * rho).powi(2);
        for j in grid.lp_high_range() {
            s += dyadic_piece(j, rho).powi(2);
        }
        lo = lo.min(s);
        hi = hi.max(s);
    }
    (lo, hi)
}

/// Finite-rank operator as a complex matrix, with a lazily computed singular spectrum.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub entries: DMatrix<Complex64>,
    svd_cache: OnceLock<Vec<f64>>,
}

impl PartialEq for OperatorMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Self {
        Self { entries, svd_cache: OnceLock::new() }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// `Σ ν_j |f_j⟩⟨f_j|` acting on grid samples, where `⟨f,g⟩ = h^d Σ f̄g`.
    pub fn from_family(fields: &[Field], nu: &[f64]) -> Result<Self> {
        if fields.len() != nu.len() {
            return Err(LabError::InvalidInput("family and coefficients differ in length".into()));
        }
        let Some(first) = fields.first() else {
            return Err(LabError::InvalidInput("empty family".into()));
        };
        let n = first.grid.len();
        let h = first.grid.cell_volume();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (f, &c) in fields.iter().zip(nu) {
            let v = nalgebra::DVector::from_column_slice(&f.values);
            m += (&v * v.adjoint()) * Complex64::new(c * h, 0.0);
        }
        Ok(Self::new(m))
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.entries.adjoint())
    }

    pub fn mul(&self, other: &OperatorMatrix) -> Self {
        Self::new(&self.entries * &other.entries)
    }

    /// Singular values, descending, computed once.
    pub fn singular_values(&self) -> &[f64] {
        self.svd_cache.get_or_init(|| {
            if self.entries.is_empty() {
                return Vec::new();
            }
            let mut s: Vec<f64> = self.entries.clone().singular_values().iter().cloned().collect();
            s.sort_by(|a, b| b.partial_cmp(a).unwrap());
            s
        })
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// `max |A − A*|` relative to `max |A|`.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.entries.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        (&self.entries - self.entries.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max) / scale
    }
}

/// `‖A‖_{C^β}`: the `ℓ^β` norm of the singular values; `β = ∞` is the operator norm.
pub fn schatten_norm(a: &OperatorMatrix, beta: f64) -> Result<f64> {
    if !(beta >= 1.0) {
        return Err(LabError::InvalidInput(format!("Schatten index {beta} must be >= 1")));
    }
    Ok(sequence_norm(a.singular_values(), beta))
}

/// `ρ_γ(x_i) = γ_{ii}/h^d`, so that `∫ρ_γ = Tr γ`.
pub fn density(gamma: &OperatorMatrix, grid: &Grid) -> Result<Field> {
    if gamma.rows() != grid.len() || gamma.cols() != grid.len() {
        return Err(LabError::InvalidInput("operator size does not match the grid".into()));
    }
    if gamma.hermitian_defect() > 1e-10 {
        return Err(LabError::InvalidInput(format!(
            "operator is not self-adjoint (defect {:.2e})",
            gamma.hermitian_defect()
        )));
    }
    let h = grid.cell_volume();
    let values = (0..grid.len()).map(|i| Complex64::new(gamma.entries[(i, i)].re / h, 0.0)).collect();
    Field::new(*grid, values)
}

/// Cell-averaged `|x − y|^{−λ}` on a 1-d grid of spacing `h`, indexed by `|i − j|`.
///
/// The average over two cells `k` apart is `h^{−2}(F((k+1)h) − 2F(kh) + F((k−1)h))`
/// with `F(u) = |u|^{2−λ}/((1−λ)(2−λ))`, which removes the diagonal singularity.
pub fn hls_kernel(n: usize, h: f64, lambda: f64) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(LabError::InvalidInput(format!("lambda = {lambda} must lie in (0, 1)")));
    }
    let c = 1.0 / ((1.0 - lambda) * (2.0 - lambda));
    let big_f = |k: f64| c * (k.abs() * h).powf(2.0 - lambda);
    Ok((0..n)
        .map(|k| {
            let k = k as f64;
            (big_f(k + 1.0) - 2.0 * big_f(k) + big_f(k - 1.0)) / (h * h)
        })
        .collect())
}

/// `∫∫ g₁(x) g₂(y) |x − y|^{−λ} dx dy` for 1-d step functions of spacing `h`.
pub fn hls_pairing(g1: &[f64], g2: &[f64], h: f64, lambda: f64) -> Result<f64> {
    if g1.len() != g2.len() {
        return Err(LabError::InvalidInput("HLS inputs differ in length".into()));
    }
    let n = g1.len();
    let k = hls_kernel(n, h, lambda)?;
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += k[i.abs_diff(j)] * g2[j];
        }
        acc += g1[i] * row;
    }
    Ok(acc * h * h)
}

/// `|pairing| / (‖g₁‖_{L^{p₁,2}} ‖g₂‖_{L^{p₂,2}})` with `1/p₁ + 1/p₂ + λ = 2`.
pub fn hls_ratio(g1: &[f64], g2: &[f64], h: f64, lambda: f64, p1: f64) -> Result<f64> {
    let p2 = 1.0 / (2.0 - lambda - 1.0 / p1);
    if !(p2 > 1.0 && p2.is_finite()) {
        return Err(LabError::InvalidInput(format!("no admissible p₂ for p₁ = {p1}, λ = {lambda}")));
    }
    let w = vec![h; g1.len()];
    let n1 = lorentz_norm(g1, &w, p1, 2.0)?;
    let n2 = lorentz_norm(g2, &w, p2, 2.0)?;
    Ok(hls_pairing(g1, g2, h, lambda)?.abs() / (n1 * n2))
}
