//! Duhamel map for `i∂_tγ = [φ(D) + w∗ρ_γ, γ]` on a periodic grid, its fixed
//! point on `[0, T]`, and the inhomogeneous Strichartz bound.
//!
//! Operators act on grid sample vectors as in [`OperatorMatrix::from_family`],
//! so `ρ_γ(x_i) = γ_ii / h^d` and Schatten norms are those of the matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::DispersionRelation;
use crate::error::{LabError, Result};
use crate::norms::{density, schatten_norm, time_norm, trapezoid_weights, MixedNormSpec, OperatorMatrix};
use crate::onstrichartz::lhs::real_lp;
use crate::onstrichartz::Psi;
use crate::spectral::{littlewood_paley, lp_low, multiplier, propagate, Field, Grid, ZeroMode};

const MAX_MATRIX_DIM: usize = 512;
/// Smoothness gain over `s` in the Besov interaction norm.
pub const BESOV_DELTA: f64 = 0.1;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Exponents of the solution space `X_T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionNorm {
    pub q: f64,
    pub r: f64,
    pub beta: f64,
    pub s: f64,
    pub psi: Psi,
}

impl SolutionNorm {
    fn validate(&self) -> Result<()> {
        if !(self.q >= 2.0) || !(self.r >= 2.0) || !(self.beta >= 1.0) || !self.s.is_finite() {
            return Err(LabError::InvalidInput("need q, r >= 2, beta >= 1 and finite s".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct HartreeState {
    pub grid: Grid,
    pub phi: DispersionRelation,
    /// Initial datum `γ₀`.
    pub gamma: OperatorMatrix,
    /// `ρ_{γ₀}`.
    pub rho: Field,
    /// Real interaction potential.
    pub w: Field,
    /// Horizon `T`.
    pub horizon: f64,
    pub norm: SolutionNorm,
}

impl HartreeState {
    pub fn new(phi: DispersionRelation, gamma: OperatorMatrix, w: Field, horizon: f64, norm: SolutionNorm) -> Result<Self> {
        let grid = w.grid;
        if grid.len() > MAX_MATRIX_DIM {
            return Err(LabError::InvalidInput(format!("grid of {} points is too large for dense operators", grid.len())));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(LabError::InvalidInput(format!("horizon T = {horizon} must be positive")));
        }
        let scale = w.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if w.values.iter().any(|v| v.im.abs() > 1e-12 * scale.max(1.0)) {
            return Err(LabError::InvalidInput("interaction potential must be real".into()));
        }
        norm.validate()?;
        let rho = density(&gamma, &grid)?;
        Ok(Self { grid, phi, gamma, rho, w, horizon, norm })
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(self.phi.clone(), self.gamma.clone(), self.w.clone(), horizon, self.norm)
    }

    pub fn with_potential(&self, w: Field) -> Result<Self> {
        Self::new(self.phi.clone(), self.gamma.clone(), w, self.horizon, self.norm)
    }

    /// `‖w‖_{𝒳_{r,s}}`: `L^{(r/2)′}` for `s = 0`, else `B^{s+δ}_{(r/2)′,∞}`.
    pub fn interaction_norm(&self) -> f64 {
        let half = self.norm.r / 2.0;
        let p = if half.is_infinite() { 1.0 } else if half == 1.0 { f64::INFINITY } else { half / (half - 1.0) };
        if self.norm.s == 0.0 {
            return self.w.lebesgue_norm(p);
        }
        let sigma = self.norm.s.abs() + BESOV_DELTA;
        let mut sup = lp_low(&self.w).lebesgue_norm(p);
        for j in self.grid.lp_high_range() {
            sup = sup.max(2f64.powf(j as f64 * sigma) * littlewood_paley(&self.w, j).lebesgue_norm(p));
        }
        sup
    }
}

/// `(γ(t_k), ρ(t_k))` on the quadrature nodes.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub gamma: Vec<OperatorMatrix>,
    pub rho: Vec<Field>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Every `step`-th node.
    fn subsample(&self, step: usize) -> Trajectory {
        let pick = |k: &usize| k % step == 0;
        Trajectory {
            times: (0..self.len()).filter(pick).map(|k| self.times[k]).collect(),
            gamma: (0..self.len()).filter(pick).map(|k| self.gamma[k].clone()).collect(),
            rho: (0..self.len()).filter(pick).map(|k| self.rho[k].clone()).collect(),
        }
    }
}

fn uniform_nodes(horizon: f64, nodes: usize) -> Vec<f64> {
    (0..nodes).map(|k| horizon * k as f64 / (nodes - 1) as f64).collect()
}

/// Matrix of a linear grid map from its action on the unit vectors.
fn grid_matrix(grid: Grid, apply: impl Fn(&Field) -> Result<Field> + Sync) -> Result<DMatrix<Complex64>> {
    let n = grid.len();
    let cols: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut e = vec![c(0.0); n];
            e[j] = c(1.0);
            Ok(apply(&Field::new(grid, e)?)?.values)
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(n, n, |i, j| cols[j][i]))
}

/// `e^{−itφ(D)}` as a matrix.
fn backward_propagator(grid: Grid, phi: &DispersionRelation, t: f64) -> DMatrix<Complex64> {
    grid_matrix(grid, |f| Ok(propagate(f, phi, -t))).expect("unit vectors are valid fields")
}

fn psi_matrix(grid: Grid, psi: Psi, power: f64) -> Result<Option<DMatrix<Complex64>>> {
    if power == 0.0 {
        return Ok(None);
    }
    Ok(Some(grid_matrix(grid, |f| multiplier(f, psi.multiplier(power), ZeroMode::Annihilate))?))
}

fn sandwich(p: &Option<DMatrix<Complex64>>, a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    match p {
        Some(p) => p * a * p,
        None => a.clone(),
    }
}

fn diagonal_density(a: &DMatrix<Complex64>, grid: Grid) -> Field {
    let h = grid.cell_volume();
    let values = (0..grid.len()).map(|i| c(a[(i, i)].re / h)).collect();
    Field::new(grid, values).expect("diagonal has grid length")
}

struct DuhamelContext<'a> {
    state: &'a HartreeState,
    times: Vec<f64>,
    /// `e^{−it_kφ(D)}`.
    props: Vec<DMatrix<Complex64>>,
    weight: Option<DMatrix<Complex64>>,
    w_hat: Vec<Complex64>,
}

impl<'a> DuhamelContext<'a> {
    fn new(state: &'a HartreeState, nodes: usize) -> Result<Self> {
        if nodes < 16 {
            return Err(LabError::InvalidInput(format!("{nodes} Duhamel nodes; at least 16 are required")));
        }
        let times = uniform_nodes(state.horizon, nodes);
        let props = times.par_iter().map(|&t| backward_propagator(state.grid, &state.phi, t)).collect();
        let weight = psi_matrix(state.grid, state.norm.psi, state.norm.s)?;
        Ok(Self { state, times, props, weight, w_hat: state.w.spectrum().to_vec() })
    }

    fn potential(&self, rho: &Field) -> Vec<f64> {
        let spec: Vec<Complex64> = self.w_hat.iter().zip(rho.spectrum()).map(|(a, b)| a * b).collect();
        let v = Field::from_spectrum(self.state.grid, spec).expect("spectrum has grid length");
        v.values.iter().map(|z| z.re).collect()
    }

    fn free(&self) -> Trajectory {
        let g0 = &self.state.gamma.entries;
        let gamma: Vec<DMatrix<Complex64>> = self.props.par_iter().map(|e| e * g0 * e.adjoint()).collect();
        self.finish(gamma)
    }

    fn finish(&self, gamma: Vec<DMatrix<Complex64>>) -> Trajectory {
        let rho = gamma.iter().map(|g| diagonal_density(g, self.state.grid)).collect();
        Trajectory { times: self.times.clone(), gamma: gamma.into_iter().map(OperatorMatrix::new).collect(), rho }
    }

    fn apply(&self, input: &Trajectory) -> Result<Trajectory> {
        let k = self.times.len();
        if input.len() != k || input.times.iter().zip(&self.times).any(|(a, b)| (a - b).abs() > 1e-12 * self.state.horizon) {
            return Err(LabError::InvalidInput("trajectory nodes do not match the Duhamel nodes".into()));
        }
        // −i[V, γ] in the interaction picture; V is diagonal so the commutator is (V_i − V_j)γ_ij
        let pieces: Vec<(DMatrix<Complex64>, f64)> = (0..k)
            .into_par_iter()
            .map(|j| {
                let v = self.potential(&input.rho[j]);
                let g = &input.gamma[j].entries;
                let comm = DMatrix::from_fn(g.nrows(), g.ncols(), |a, b| g[(a, b)] * c(v[a] - v[b]));
                let size = comm.norm();
                let e = &self.props[j];
                (e.adjoint() * comm * e * Complex64::new(0.0, -1.0), size)
            })
            .collect();
        let sizes: Vec<f64> = pieces.iter().map(|p| p.1).collect();
        let top = sizes.iter().cloned().fold(0.0, f64::max);
        for (j, pair) in sizes.windows(2).enumerate() {
            if pair[1] > 1.1 * pair[0] && pair[1] > 1e-12 * top {
                return Err(LabError::Numerical(format!(
                    "commutator norm grows by {:.1}% between nodes {j} and {}; refine the Duhamel nodes",
                    100.0 * (pair[1] / pair[0] - 1.0),
                    j + 1
                )));
            }
        }
        let mut sums = Vec::with_capacity(k);
        let mut acc = self.state.gamma.entries.clone();
        sums.push(acc.clone());
        for j in 1..k {
            let dt = self.times[j] - self.times[j - 1];
            acc += (&pieces[j - 1].0 + &pieces[j].0) * c(0.5 * dt);
            sums.push(acc.clone());
        }
        let gamma: Vec<DMatrix<Complex64>> = sums.par_iter().zip(&self.props).map(|(s, e)| e * s * e.adjoint()).collect();
        Ok(self.finish(gamma))
    }

    /// `‖(γ_a − γ_b, ρ_a − ρ_b)‖_{X_T}`.
    fn distance(&self, a: &Trajectory, b: Option<&Trajectory>) -> Result<f64> {
        distance(self.state, &self.weight, a, b)
    }
}

fn distance(
    state: &HartreeState,
    weight: &Option<DMatrix<Complex64>>,
    a: &Trajectory,
    b: Option<&Trajectory>,
) -> Result<f64> {
    let n = &state.norm;
    let cell = state.grid.cell_volume();
    let parts: Vec<(f64, f64)> = (0..a.len())
        .into_par_iter()
        .map(|k| {
            let dg = match b {
                Some(b) => &a.gamma[k].entries - &b.gamma[k].entries,
                None => a.gamma[k].entries.clone(),
            };
            let sch = schatten_norm(&OperatorMatrix::new(sandwich(weight, &dg)), n.beta)?;
            let dr: Vec<f64> = match b {
                Some(b) => a.rho[k].values.iter().zip(&b.rho[k].values).map(|(x, y)| x.re - y.re).collect(),
                None => a.rho[k].values.iter().map(|x| x.re).collect(),
            };
            Ok((sch, real_lp(&dr, cell, n.r / 2.0)))
        })
        .collect::<Result<_>>()?;
    let sup = parts.iter().map(|p| p.0).fold(0.0, f64::max);
    let profile: Vec<f64> = parts.iter().map(|p| p.1).collect();
    Ok(sup + time_norm(&profile, &a.times, &MixedNormSpec::new(n.q / 2.0, n.r / 2.0))?)
}

/// One application of the Duhamel map `Λ` to a trajectory on uniform nodes of `[0, T]`.
pub fn hartree_duhamel(state: &HartreeState, input: &Trajectory) -> Result<Trajectory> {
    DuhamelContext::new(state, input.len())?.apply(input)
}

/// Free trajectory `e^{−itφ(D)}γ₀e^{itφ(D)}` on `nodes` uniform nodes.
pub fn free_trajectory(state: &HartreeState, nodes: usize) -> Result<Trajectory> {
    Ok(DuhamelContext::new(state, nodes)?.free())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HartreeOptions {
    pub nodes: usize,
    pub max_nodes: usize,
    /// Relative `X_T` change below which doubling the nodes stops.
    pub refine_rtol: f64,
}

impl Default for HartreeOptions {
    fn default() -> Self {
        Self { nodes: 17, max_nodes: 513, refine_rtol: 0.005 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedPointOutcome {
    Converged,
    /// Three consecutive ratios `≥ 1`.
    Diverged,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct FixedPointReport {
    pub trajectory: Trajectory,
    pub outcome: FixedPointOutcome,
    pub iterations: usize,
    /// `‖Λ(u) − u‖_{X_T}` at the returned iterate.
    pub residual: f64,
    /// `‖u_{n+1} − u_n‖ / ‖u_n − u_{n−1}‖` per iteration.
    pub ratios: Vec<f64>,
    /// Largest measured ratio; zero when the first step already converged.
    pub contraction: f64,
    pub nodes: usize,
    /// Relative `X_T` change against the previous node count, when there was one.
    pub refinement_change: Option<f64>,
    pub interaction_norm: f64,
}

fn iterate(ctx: &DuhamelContext, tol: f64, max_iter: usize) -> Result<FixedPointReport> {
    let mut u = ctx.free();
    let mut prev: Option<f64> = None;
    let mut ratios = Vec::new();
    let mut residual = f64::INFINITY;
    for n in 1..=max_iter {
        let next = ctx.apply(&u)?;
        let diff = ctx.distance(&next, Some(&u))?;
        residual = diff;
        if let Some(p) = prev {
            if p > 0.0 {
                ratios.push(diff / p);
            }
        }
        u = next;
        let report = |outcome| FixedPointReport {
            trajectory: Trajectory { times: vec![], gamma: vec![], rho: vec![] },
            outcome,
            iterations: n,
            residual,
            ratios: ratios.clone(),
            contraction: ratios.iter().cloned().fold(0.0, f64::max),
            nodes: ctx.times.len(),
            refinement_change: None,
            interaction_norm: ctx.state.interaction_norm(),
        };
        if diff < tol {
            return Ok(FixedPointReport { trajectory: u, ..report(FixedPointOutcome::Converged) });
        }
        if ratios.len() >= 3 && ratios[ratios.len() - 3..].iter().all(|&r| r >= 1.0) {
            return Ok(FixedPointReport { trajectory: u, ..report(FixedPointOutcome::Diverged) });
        }
        prev = Some(diff);
    }
    Ok(FixedPointReport {
        trajectory: u,
        outcome: FixedPointOutcome::MaxIterations,
        iterations: max_iter,
        residual,
        contraction: ratios.iter().cloned().fold(0.0, f64::max),
        ratios,
        nodes: ctx.times.len(),
        refinement_change: None,
        interaction_norm: ctx.state.interaction_norm(),
    })
}

/// Picard iteration of `Λ` from the free solution, with the node count doubled
/// until the fixed point moves by less than `refine_rtol` in `X_T`.
pub fn hartree_fixed_point(state: &HartreeState, tol: f64, max_iter: usize, opts: HartreeOptions) -> Result<FixedPointReport> {
    if !(tol > 0.0) || max_iter == 0 {
        return Err(LabError::InvalidInput("need tol > 0 and at least one iteration".into()));
    }
    let mut nodes = opts.nodes.max(16);
    let mut previous: Option<FixedPointReport> = None;
    while nodes <= opts.max_nodes {
        let ctx = DuhamelContext::new(state, nodes)?;
        let mut report = match iterate(&ctx, tol, max_iter) {
            Ok(r) => r,
            Err(LabError::Numerical(_)) => {
                previous = None;
                nodes = 2 * nodes - 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if report.outcome != FixedPointOutcome::Converged {
            return Ok(report);
        }
        if let Some(prev) = &previous {
            let coarse = report.trajectory.subsample(2);
            let change = distance(state, &ctx.weight, &coarse, Some(&prev.trajectory))?;
            let size = distance(state, &ctx.weight, &coarse, None)?.max(f64::MIN_POSITIVE);
            report.refinement_change = Some(change / size);
            if change <= opts.refine_rtol * size {
                return Ok(report);
            }
        }
        previous = Some(report);
        nodes = 2 * nodes - 1;
    }
    Err(LabError::Numerical(format!(
        "Duhamel quadrature not resolved within {} nodes",
        opts.max_nodes
    )))
}

#[derive(Debug, Clone)]
pub struct BisectionReport {
    /// Largest accepted horizon.
    pub t0: f64,
    pub report: FixedPointReport,
    /// `(T, contraction, converged)` for every probe, in order.
    pub probes: Vec<(f64, f64, bool)>,
}

/// Largest `T` (to `steps` bisections) at which the iteration converges with
/// contraction below `theta`, starting from `state.horizon`.
pub fn hartree_bisect(
    state: &HartreeState,
    theta: f64,
    tol: f64,
    max_iter: usize,
    steps: usize,
    opts: HartreeOptions,
) -> Result<BisectionReport> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(LabError::InvalidInput(format!("target contraction {theta} must lie in (0, 1)")));
    }
    let mut probes = Vec::new();
    let mut probe = |t: f64| -> Result<(bool, FixedPointReport)> {
        let rep = hartree_fixed_point(&state.with_horizon(t)?, tol, max_iter, opts)?;
        let ok = rep.outcome == FixedPointOutcome::Converged && rep.contraction < theta;
        probes.push((t, rep.contraction, rep.outcome == FixedPointOutcome::Converged));
        Ok((ok, rep))
    };
    let mut t = state.horizon;
    let (mut ok, mut rep) = probe(t)?;
    let (mut lo, mut hi);
    let mut good;
    if ok {
        lo = t;
        good = rep;
        hi = f64::NAN;
        for _ in 0..20 {
            t *= 2.0;
            (ok, rep) = probe(t)?;
            if !ok {
                hi = t;
                break;
            }
            lo = t;
            good = rep;
        }
        if hi.is_nan() {
            return Err(LabError::Numerical(format!("contraction stays below {theta} up to T = {lo}")));
        }
    } else {
        hi = t;
        lo = f64::NAN;
        good = rep;
        for _ in 0..30 {
            t *= 0.5;
            (ok, rep) = probe(t)?;
            if ok {
                lo = t;
                good = rep;
                break;
            }
            hi = t;
        }
        if lo.is_nan() {
            return Err(LabError::Numerical(format!("no horizon down to {t:.3e} contracts below {theta}")));
        }
    }
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        (ok, rep) = probe(mid)?;
        if ok {
            lo = mid;
            good = rep;
        } else {
            hi = mid;
        }
    }
    Ok(BisectionReport { t0: lo, report: good, probes })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InhomogeneousReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, or `0` when both vanish.
    pub ratio: f64,
}

fn absolute(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let herm = (a + a.adjoint()) * c(0.5);
    let eig = herm.symmetric_eigen();
    let abs = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|v| c(v.abs())));
    &eig.eigenvectors * DMatrix::from_diagonal(&abs) * eig.eigenvectors.adjoint()
}

/// Both sides of `‖ρ[Ψ^{−s}γ_R(t)Ψ^{−s}]‖_{L^{q/2}L^{r/2}} ≤ 4C_* ‖∫ e^{itφ(D)}|R(t)|e^{−itφ(D)} dt‖_{C^β}`
/// with `γ_R(t) = ∫_0^t e^{−i(t−t′)φ(D)} R(t′) e^{i(t−t′)φ(D)} dt′`, by trapezoid on the nodes.
#[allow(clippy::too_many_arguments)]
pub fn inhomogeneous_bound_check(
    grid: Grid,
    times: &[f64],
    source: &[OperatorMatrix],
    phi: &DispersionRelation,
    q: f64,
    r: f64,
    beta: f64,
    s: f64,
    psi: Psi,
) -> Result<InhomogeneousReport> {
    if times.len() < 2 || times.len() != source.len() || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::InvalidInput("need at least two increasing nodes, one operator each".into()));
    }
    if grid.len() > MAX_MATRIX_DIM {
        return Err(LabError::InvalidInput("grid too large for dense operators".into()));
    }
    let n = grid.len();
    for (k, op) in source.iter().enumerate() {
        if op.rows() != n || op.cols() != n {
            return Err(LabError::InvalidInput(format!("source at node {k} does not match the grid")));
        }
        if op.hermitian_defect() > 1e-10 {
            return Err(LabError::InvalidInput(format!("source at node {k} is not self-adjoint")));
        }
    }
    let norm = SolutionNorm { q, r, beta, s, psi };
    norm.validate()?;
    let props: Vec<DMatrix<Complex64>> = times.par_iter().map(|&t| backward_propagator(grid, phi, t)).collect();
    let weight = psi_matrix(grid, psi, -s)?;
    let pulled: Vec<DMatrix<Complex64>> =
        source.par_iter().zip(&props).map(|(op, e)| e.adjoint() * &op.entries * e).collect();
    let mut sums = Vec::with_capacity(times.len());
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    sums.push(acc.clone());
    for j in 1..times.len() {
        acc += (&pulled[j - 1] + &pulled[j]) * c(0.5 * (times[j] - times[j - 1]));
        sums.push(acc.clone());
    }
    let cell = grid.cell_volume();
    let profile: Vec<f64> = sums
        .par_iter()
        .zip(&props)
        .map(|(sum, e)| {
            let g = sandwich(&weight, &(e * sum * e.adjoint()));
            let rho: Vec<f64> = (0..n).map(|i| g[(i, i)].re / cell).collect();
            real_lp(&rho, cell, r / 2.0)
        })
        .collect();
    let lhs = time_norm(&profile, times, &MixedNormSpec::new(q / 2.0, r / 2.0))?;
    let tw = trapezoid_weights(times);
    let mut total = DMatrix::<Complex64>::zeros(n, n);
    for ((op, e), w) in source.iter().zip(&props).zip(&tw) {
        total += e.adjoint() * absolute(&op.entries) * e * c(*w);
    }
    let rhs = schatten_norm(&OperatorMatrix::new(total), beta)?;
    let ratio = if lhs == 0.0 && rhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(InhomogeneousReport { lhs, rhs, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::linalg::LU;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(1, 32, 4.0 * PI).unwrap()
    }

    fn norm() -> SolutionNorm {
        SolutionNorm { q: 6.0, r: 6.0, beta: 1.5, s: 0.0, psi: Psi::Homogeneous }
    }

    fn orbitals(grid: Grid) -> Vec<Field> {
        let a = Field::from_fn(grid, |x| c((-x[0] * x[0]).exp()));
        let b = Field::from_fn(grid, |x| Complex64::new(x[0], 0.3) * (-0.7 * (x[0] - 0.5).powi(2)).exp());
        // Gram–Schmidt under ⟨f, g⟩ = h Σ f̄g
        let a = a.scale(c(1.0 / a.l2_norm()));
        let b = b.sub(&a.scale(a.inner(&b)));
        let b = b.scale(c(1.0 / b.l2_norm()));
        vec![a, b]
    }

    fn potential(grid: Grid, strength: f64) -> Field {
        Field::from_fn(grid, |x| c(strength * (-2.0 * x[0] * x[0]).exp()))
    }

    fn state(strength: f64, horizon: f64) -> HartreeState {
        let g = grid();
        let gamma = OperatorMatrix::from_family(&orbitals(g), &[1.0, 0.6]).unwrap();
        HartreeState::new(DispersionRelation::Power { alpha: 3.0 }, gamma, potential(g, strength), horizon, norm()).unwrap()
    }

    #[test]
    fn zero_potential_is_free_flow() {
        let st = state(0.0, 0.5);
        let rep = hartree_fixed_point(&st, 1e-12, 10, HartreeOptions::default()).unwrap();
        assert_eq!(rep.outcome, FixedPointOutcome::Converged);
        assert_eq!(rep.iterations, 1);
        assert!(rep.residual < 1e-12);
        let free = free_trajectory(&st, rep.nodes).unwrap();
        for (a, b) in rep.trajectory.gamma.iter().zip(&free.gamma) {
            assert!((&a.entries - &b.entries).iter().all(|v| v.norm() < 1e-12));
        }
    }

    #[test]
    fn zero_datum_stays_zero() {
        let g = grid();
        let st = HartreeState::new(DispersionRelation::schrodinger(), OperatorMatrix::zeros(32, 32), potential(g, 1.0), 0.2, norm()).unwrap();
        let free = free_trajectory(&st, 17).unwrap();
        let out = hartree_duhamel(&st, &free).unwrap();
        assert!(out.gamma.iter().all(|m| m.entries.iter().all(|v| v.norm() == 0.0)));
        assert!(out.rho.iter().all(|r| r.values.iter().all(|v| v.norm() == 0.0)));
    }

    #[test]
    fn duhamel_keeps_adjointness_and_trace() {
        let st = state(2.0, 0.1);
        let free = free_trajectory(&st, 33).unwrap();
        let out = hartree_duhamel(&st, &free).unwrap();
        let tr0 = st.gamma.trace().re;
        for g in &out.gamma {
            assert!(g.hermitian_defect() < 1e-9);
            assert!((g.trace().re - tr0).abs() < 1e-9);
        }
    }

    #[test]
    fn too_few_nodes_rejected() {
        let st = state(1.0, 0.1);
        assert!(free_trajectory(&st, 9).is_err());
    }

    #[test]
    fn non_selfadjoint_datum_rejected() {
        let g = grid();
        let mut m = DMatrix::<Complex64>::zeros(32, 32);
        m[(0, 1)] = c(1.0);
        assert!(HartreeState::new(DispersionRelation::schrodinger(), OperatorMatrix::new(m), potential(g, 1.0), 0.1, norm()).is_err());
    }

    /// Single orbital `i∂_tψ = (φ(D) + w∗|ψ|²)ψ` by Crank–Nicolson with a
    /// predictor for the midpoint potential.
    fn crank_nicolson(st: &HartreeState, psi0: &Field, steps: usize) -> Field {
        let g = st.grid;
        let n = g.len();
        let dt = st.horizon / steps as f64;
        let lap = grid_matrix(g, |f| Ok(f.apply_radial(|r| c(st.phi.profile(r))))).unwrap();
        let pot = |psi: &DVector<Complex64>| -> Vec<f64> {
            let rho = Field::new(g, psi.iter().map(|v| c(v.norm_sqr())).collect()).unwrap();
            let spec: Vec<Complex64> = st.w.spectrum().iter().zip(rho.spectrum()).map(|(a, b)| a * b).collect();
            Field::from_spectrum(g, spec).unwrap().values.iter().map(|v| v.re).collect()
        };
        let step = |psi: &DVector<Complex64>, v: &[f64]| -> DVector<Complex64> {
            let mut h = lap.clone();
            for i in 0..n {
                h[(i, i)] += c(v[i]);
            }
            let half = Complex64::new(0.0, 0.5 * dt);
            let a = DMatrix::<Complex64>::identity(n, n) + &h * half;
            let b = DMatrix::<Complex64>::identity(n, n) - &h * half;
            LU::new(a).solve(&(b * psi)).unwrap()
        };
        let mut psi = DVector::from_column_slice(&psi0.values);
        for _ in 0..steps {
            let v0 = pot(&psi);
            let guess = step(&psi, &v0);
            let v1 = pot(&guess);
            let mid: Vec<f64> = v0.iter().zip(&v1).map(|(a, b)| 0.5 * (a + b)).collect();
            psi = step(&psi, &mid);
        }
        Field::new(g, psi.iter().cloned().collect()).unwrap()
    }

    #[test]
    fn rank_one_matches_single_equation_stepper() {
        let g = grid();
        let psi0 = orbitals(g).remove(0);
        let gamma = OperatorMatrix::from_family(std::slice::from_ref(&psi0), &[1.0]).unwrap();
        let st = HartreeState::new(DispersionRelation::Power { alpha: 3.0 }, gamma, potential(g, 0.5), 0.2, norm()).unwrap();
        let oracle = crank_nicolson(&st, &psi0, 4000);
        let rho_oracle: Vec<f64> = oracle.values.iter().map(|v| v.norm_sqr()).collect();
        let mut errs = Vec::new();
        for nodes in [17, 33, 65] {
            let ctx = DuhamelContext::new(&st, nodes).unwrap();
            let rep = iterate(&ctx, 1e-13, 60).unwrap();
            assert_eq!(rep.outcome, FixedPointOutcome::Converged);
            let last = rep.trajectory.rho.last().unwrap();
            let err = last.values.iter().zip(&rho_oracle).map(|(a, b)| (a.re - b).abs()).fold(0.0, f64::max);
            errs.push(err);
        }
        // second order in the node spacing
        assert!(errs[0] / errs[1] > 3.0 && errs[1] / errs[2] > 3.0, "{errs:?}");
        assert!(errs[2] < 1e-4, "{errs:?}");
    }

    #[test]
    fn contraction_is_linear_in_the_potential() {
        let a = hartree_fixed_point(&state(4.0, 0.3), 1e-10, 50, HartreeOptions::default()).unwrap();
        let b = hartree_fixed_point(&state(2.0, 0.3), 1e-10, 50, HartreeOptions::default()).unwrap();
        assert_eq!(a.outcome, FixedPointOutcome::Converged);
        assert_eq!(b.outcome, FixedPointOutcome::Converged);
        let factor = a.contraction / b.contraction;
        assert!((1.6..=2.4).contains(&factor), "{} / {} = {factor}", a.contraction, b.contraction);
    }

    #[test]
    fn inhomogeneous_zero_source() {
        let g = grid();
        let times = uniform_nodes(0.5, 17);
        let src = vec![OperatorMatrix::zeros(32, 32); 17];
        let rep = inhomogeneous_bound_check(g, &times, &src, &DispersionRelation::schrodinger(), 6.0, 6.0, 1.5, 0.0, Psi::Homogeneous).unwrap();
        assert_eq!((rep.lhs, rep.rhs, rep.ratio), (0.0, 0.0, 0.0));
    }

    #[test]
    fn inhomogeneous_single_node_is_homogeneous() {
        // R = δ at t = 0: γ_R(t_k) = (Δt/2) e^{−it_kφ}Re^{it_kφ} for k ≥ 1
        let g = grid();
        let phi = DispersionRelation::Power { alpha: 3.0 };
        let times = uniform_nodes(0.5, 17);
        let f = orbitals(g).remove(1);
        let r0 = OperatorMatrix::from_family(std::slice::from_ref(&f), &[1.0]).unwrap();
        let mut src = vec![OperatorMatrix::zeros(32, 32); 17];
        src[0] = r0;
        let rep = inhomogeneous_bound_check(g, &times, &src, &phi, 6.0, 6.0, 1.5, 0.0, Psi::Homogeneous).unwrap();
        let half = 0.5 * (times[1] - times[0]);
        let cell = g.cell_volume();
        let profile: Vec<f64> = times
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                if k == 0 {
                    return 0.0;
                }
                let u = propagate(&f, &phi, -t);
                let rho: Vec<f64> = u.values.iter().map(|v| half * v.norm_sqr()).collect();
                real_lp(&rho, cell, 3.0)
            })
            .collect();
        let direct = time_norm(&profile, &times, &MixedNormSpec::new(3.0, 3.0)).unwrap();
        assert!((rep.lhs - direct).abs() < 1e-12 * direct, "{} vs {direct}", rep.lhs);
        assert!((rep.rhs - half).abs() < 1e-12);
        assert!(rep.ratio <= 1.0);
    }
}
