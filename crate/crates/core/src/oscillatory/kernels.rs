//! The weighted kernels `𝒲_κ`, `𝒥_{κ,ε}`, `𝒦_{κ,ε}` and `ℐ^{φ,±}_{ε,κ}`.
//!
//! Every kernel has a radial weight and a radial phase, so
//! `∫_{ℝ^d} e^{i(x·ξ + tφ(ξ))} a(|ξ|) dξ = ∫_0^∞ σ̂_d(ρ|x|) e^{itφ₀(ρ)} a(ρ) ρ^{d−1} dρ`.
//! Unimodular factors such as `ρ^{iκ}` are moved into the phase so the
//! amplitude handed to the quadrature never oscillates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bessel::{sphere_area, sphere_ft_branches, sphere_ft_value, split_threshold};
use super::bump::smooth_bump;
use super::quad::{integrate, Piece, QuadOptions, QuadResult};
use crate::dispersion::{norm, AlmostHomogeneousSymbol};
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OscKind {
    #[serde(rename = "wave-W")]
    WaveW,
    #[serde(rename = "kg-J")]
    KgJ,
    #[serde(rename = "kg-K")]
    KgK,
    #[serde(rename = "almosthom-I-plus")]
    AlmostHomPlus,
    #[serde(rename = "almosthom-I-minus")]
    AlmostHomMinus,
}

impl OscKind {
    /// Whether the estimate is stated for `κ` times the kernel.
    pub fn kappa_weighted(&self) -> bool {
        matches!(self, OscKind::WaveW | OscKind::KgJ)
    }

    pub fn default_epsilon(&self) -> f64 {
        match self {
            OscKind::AlmostHomMinus => 1e3,
            _ => 1e-3,
        }
    }

    /// Decay rate the corresponding estimate asserts.
    pub fn expected_rate(&self, d: u32) -> f64 {
        match self {
            OscKind::WaveW | OscKind::KgJ => (d as f64 - 1.0) / 2.0,
            _ => d as f64 / 2.0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            OscKind::WaveW => "wave-W",
            OscKind::KgJ => "kg-J",
            OscKind::KgK => "kg-K",
            OscKind::AlmostHomPlus => "almosthom-I-plus",
            OscKind::AlmostHomMinus => "almosthom-I-minus",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscIntegralSpec {
    pub kind: OscKind,
    pub d: u32,
    pub kappa: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub phi: Option<AlmostHomogeneousSymbol>,
}

impl OscIntegralSpec {
    pub fn new(kind: OscKind, d: u32, kappa: f64) -> Self {
        Self { kind, d, kappa, epsilon: kind.default_epsilon(), gamma: 0.0, phi: None }
    }

    pub fn with_symbol(mut self, phi: AlmostHomogeneousSymbol) -> Self {
        self.phi = Some(phi);
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::InvalidInput(m));
        if self.d == 0 {
            return bad("dimension must be at least 1".into());
        }
        if self.kind == OscKind::WaveW && self.d < 2 {
            return bad("wave-W is defined for d >= 2".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon = {} must be positive", self.epsilon));
        }
        if !self.kappa.is_finite() {
            return bad("kappa must be finite".into());
        }
        if !(self.gamma >= 0.0) {
            return bad(format!("gamma = {} must be nonnegative", self.gamma));
        }
        if self.gamma > 0.0 && !matches!(self.kind, OscKind::KgJ | OscKind::KgK) {
            return bad("extra damping gamma applies to the Klein–Gordon kernels only".into());
        }
        match self.kind {
            OscKind::AlmostHomPlus | OscKind::AlmostHomMinus => {
                let Some(phi) = &self.phi else {
                    return bad("almost-homogeneous kinds need a symbol".into());
                };
                if self.kind == OscKind::AlmostHomPlus && phi.alpha <= 0.0 {
                    return bad("almosthom-I-plus requires alpha > 0".into());
                }
                if self.kind == OscKind::AlmostHomMinus && phi.alpha >= 0.0 {
                    return bad("almosthom-I-minus requires alpha < 0".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Radial form of the integrand.
    pub fn radial(&self) -> Result<RadialIntegrand<'static>> {
        self.validate()?;
        let d = self.d;
        let k = self.kappa;
        let eps = self.epsilon;
        let df = d as f64;
        let r = match self.kind {
            OscKind::WaveW => RadialIntegrand {
                d,
                weight: Box::new(move |rho: f64| rho.powf(-(df + 1.0) / 2.0) * smooth_bump(rho)),
                theta: Box::new(move |rho: f64| k * rho.ln()),
                dtheta: Box::new(move |rho: f64| k / rho),
                phi_slope: 1.0,
                phi_rest: Box::new(|_| 0.0),
                dphi_rest: Box::new(|_| 0.0),
                lower: 0.0,
                upper: 1.0,
                breaks: vec![0.5],
                lower_power: Some((df - 3.0) / 2.0),
                upper_tail: 0.0,
            },
            OscKind::KgJ | OscKind::KgK => {
                let base = if self.kind == OscKind::KgJ { (df + 1.0) / 4.0 } else { (df + 2.0) / 4.0 };
                let p = base + self.gamma;
                RadialIntegrand {
                    d,
                    weight: Box::new(move |rho: f64| smooth_bump(eps * rho) * (1.0 + rho * rho).powf(-p)),
                    theta: Box::new(move |rho: f64| -k * (rho * rho).ln_1p()),
                    dtheta: Box::new(move |rho: f64| -2.0 * k * rho / (1.0 + rho * rho)),
                    // ⟨ρ⟩ = ρ + 1/(⟨ρ⟩ + ρ) keeps the light-cone phase free of cancellation
                    phi_slope: 1.0,
                    phi_rest: Box::new(|rho: f64| 1.0 / ((1.0 + rho * rho).sqrt() + rho)),
                    dphi_rest: Box::new(|rho: f64| {
                        let j = (1.0 + rho * rho).sqrt();
                        -1.0 / (j * (j + rho))
                    }),
                    lower: 0.0,
                    upper: 1.0 / eps,
                    breaks: vec![0.5 / eps],
                    lower_power: None,
                    upper_tail: 0.0,
                }
            }
            OscKind::AlmostHomPlus | OscKind::AlmostHomMinus => {
                let phi = self.phi.clone().unwrap();
                let plus = self.kind == OscKind::AlmostHomPlus;
                let powers = phi.terms.iter().filter(|t| t.coef != 0.0).map(|t| t.power);
                let (pmin, pmax) = powers.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p), b.max(p)));
                let cutoff = move |rho: f64| if plus { smooth_bump(eps * rho) } else { 1.0 - smooth_bump(rho / eps) };
                let p1 = phi.clone();
                let p2 = phi.clone();
                let p3 = phi.clone();
                let p4 = phi.clone();
                let p5 = phi;
                let det = move |s: &AlmostHomogeneousSymbol, rho: f64| {
                    s.derivative(2, rho) * (s.derivative(1, rho) / rho).powi(d as i32 - 1)
                };
                let (lower, upper, breaks, lower_power, upper_tail) = if plus {
                    (0.0, 1.0 / eps, vec![0.5 / eps], Some(df * pmin / 2.0 - 1.0), 0.0)
                } else {
                    (0.5 * eps, f64::INFINITY, vec![eps], None, df * pmax / 2.0 - 1.0)
                };
                RadialIntegrand {
                    d,
                    weight: Box::new(move |rho: f64| cutoff(rho) * det(&p1, rho).abs().sqrt()),
                    theta: Box::new(move |rho: f64| k * det(&p2, rho).abs().ln()),
                    dtheta: Box::new(move |rho: f64| {
                        let s = &p3;
                        let (d1, d2, d3) = (s.derivative(1, rho), s.derivative(2, rho), s.derivative(3, rho));
                        k * (d3 / d2 + (df - 1.0) * (d2 / d1 - 1.0 / rho))
                    }),
                    phi_slope: 0.0,
                    phi_rest: Box::new(move |rho: f64| p4.derivative(0, rho)),
                    dphi_rest: Box::new(move |rho: f64| p5.derivative(1, rho)),
                    lower,
                    upper,
                    breaks,
                    lower_power,
                    upper_tail,
                }
            }
        };
        Ok(r)
    }
}

type RealFn<'a> = Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>;

/// `∫_lower^upper σ̂_d(ρ|x|) w(ρ) e^{i(tφ₀(ρ) + θ(ρ))} ρ^{d−1} dρ`
/// with `φ₀(ρ) = phi_slope·ρ + phi_rest(ρ)`.
pub struct RadialIntegrand<'a> {
    pub d: u32,
    pub weight: RealFn<'a>,
    pub theta: RealFn<'a>,
    pub dtheta: RealFn<'a>,
    pub phi_slope: f64,
    pub phi_rest: RealFn<'a>,
    pub dphi_rest: RealFn<'a>,
    pub lower: f64,
    pub upper: f64,
    pub breaks: Vec<f64>,
    /// With `lower = 0`: `w(ρ)ρ^{d−1} ≲ ρ^p` near the origin, cut off with a bound.
    pub lower_power: Option<f64>,
    /// With `upper = ∞`: `w(ρ)ρ^{d−1} ≲ ρ^p` at infinity, `p < −1`.
    pub upper_tail: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscValue {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
    pub leaves: usize,
}

fn ser_complex<S: serde::Serializer>(v: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&v.re)?;
    t.serialize_element(&v.im)?;
    t.end()
}

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Target relative accuracy of the final value.
    pub rtol: f64,
    /// Absolute accuracy below which values are not refined further.
    pub atol_floor: f64,
    pub quad: QuadOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { rtol: 1e-9, atol_floor: 1e-15, quad: QuadOptions::default() }
    }
}

impl RadialIntegrand<'_> {
    fn sphere_bound(&self) -> f64 {
        if self.d == 1 {
            2.0
        } else {
            sphere_area(self.d)
        }
    }

    /// Lower cutoff and the bound on the discarded part `[0, cutoff]`.
    fn lower_cut(&self, tol: f64) -> (f64, f64) {
        let Some(p) = self.lower_power else {
            return (self.lower, 0.0);
        };
        let df = self.d as f64;
        let probe = 2f64.powi(-40).min(self.upper / 4.0);
        let c = 2.0 * self.sphere_bound() * (self.weight)(probe) * probe.powf(df - 1.0) / probe.powf(p);
        let tail = |r: f64| c * r.powf(p + 1.0) / (p + 1.0);
        let mut r = self.upper.min(1.0) / 2.0;
        while tail(r) > tol && r > 1e-300 {
            r /= 2.0;
        }
        (r, tail(r))
    }

    fn upper_cut(&self, tol: f64) -> (f64, f64) {
        if self.upper.is_finite() {
            return (self.upper, 0.0);
        }
        let df = self.d as f64;
        let p = self.upper_tail;
        let start = self.breaks.iter().cloned().fold(self.lower, f64::max) * 2.0;
        let c = 2.0 * self.sphere_bound() * (self.weight)(start) * start.powf(df - 1.0) / start.powf(p);
        let tail = |r: f64| c * r.powf(p + 1.0) / (-(p + 1.0));
        let mut r = start;
        while tail(r) > tol && r < 1e300 {
            r *= 2.0;
        }
        (r, tail(r))
    }

    /// Single pass at absolute tolerance `tol`.
    pub fn eval_atol(&self, x_norm: f64, t: f64, tol: f64, quad: QuadOptions) -> OscValue {
        let (lo, lo_tail) = self.lower_cut(0.05 * tol);
        let (hi, hi_tail) = self.upper_cut(0.05 * tol);
        let z0 = split_threshold(self.d);
        let rho_split = if x_norm > 0.0 { z0 / x_norm } else { f64::INFINITY };

        let mut points = vec![lo, hi];
        points.extend(self.breaks.iter().cloned().filter(|&b| b > lo && b < hi));
        if rho_split > lo && rho_split < hi {
            points.push(rho_split);
        }
        let start = if lo > 0.0 { lo.log2().ceil() as i32 } else { 0 };
        let stop = hi.log2().floor() as i32;
        for k in start..=stop {
            let p = 2f64.powi(k);
            if p > lo && p < hi {
                points.push(p);
            }
        }
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup();

        let df = self.d as f64;
        let d = self.d;
        let n = (points.len() - 1) as f64;
        let tol_i = 0.9 * tol / n;
        let mut total = QuadResult::default();
        let phase_base = |r: f64| t * (self.phi_rest)(r) + (self.theta)(r);
        let dphase_base = |r: f64| t * (self.dphi_rest)(r) + (self.dtheta)(r);
        let slope = t * self.phi_slope;
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= rho_split {
                let amp = |r: f64| {
                    Complex64::new((self.weight)(r) * r.powf(df - 1.0) * sphere_ft_value(d, r * x_norm), 0.0)
                };
                let ph = |r: f64| phase_base(r) + slope * r;
                let dph = |r: f64| dphase_base(r) + slope;
                let piece = Piece { amp: &amp, phase: &ph, dphase: &dph };
                total.absorb(integrate(&piece, a, b, tol_i, quad));
            } else {
                for sign in [1.0, -1.0] {
                    let amp = |r: f64| {
                        let (sp, sm) = sphere_ft_branches(d, r * x_norm);
                        let s = if sign > 0.0 { sp } else { sm };
                        s * ((self.weight)(r) * r.powf(df - 1.0))
                    };
                    let lin = slope + sign * x_norm;
                    let ph = |r: f64| phase_base(r) + lin * r;
                    let dph = |r: f64| dphase_base(r) + lin;
                    let piece = Piece { amp: &amp, phase: &ph, dphase: &dph };
                    total.absorb(integrate(&piece, a, b, 0.5 * tol_i, quad));
                }
            }
        }
        OscValue {
            value: total.value,
            error: total.error + lo_tail + hi_tail,
            converged: total.converged,
            leaves: total.leaves,
        }
    }

    /// Evaluates to relative accuracy `rtol`, refining the absolute tolerance once from a coarse pass.
    pub fn eval(&self, x_norm: f64, t: f64, opts: EvalOptions) -> OscValue {
        let mut tol = 1e-8f64.max(opts.atol_floor);
        let mut v = self.eval_atol(x_norm, t, tol, opts.quad);
        for _ in 0..3 {
            let target = (opts.rtol * v.value.norm()).max(opts.atol_floor);
            if v.error <= target || tol <= opts.atol_floor {
                break;
            }
            tol = (0.5 * target).max(opts.atol_floor);
            v = self.eval_atol(x_norm, t, tol, opts.quad);
        }
        v
    }
}

/// Evaluates the kernel at `(x, t)`; depends on `x` only through `|x|`.
pub fn eval_oscillatory(spec: &OscIntegralSpec, x: &[f64], t: f64, opts: EvalOptions) -> Result<OscValue> {
    if x.len() != spec.d as usize {
        return Err(LabError::InvalidInput(format!("x has {} components, d = {}", x.len(), spec.d)));
    }
    let radial = spec.radial()?;
    let v = radial.eval(norm(x), t, opts);
    if !v.converged {
        return Err(LabError::Numerical(format!(
            "tolerance not met: value {} with residual bound {:.3e}",
            v.value, v.error
        )));
    }
    Ok(v)
}

/// Quadrature value and closed form of `∫ e^{i(xξ + tξ²)} e^{−ξ²} dξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianCalibration {
    pub quadrature: Complex64,
    pub exact: Complex64,
    pub error_estimate: f64,
}

impl GaussianCalibration {
    pub fn gap(&self) -> f64 {
        (self.quadrature - self.exact).norm()
    }
}

/// Runs the quadrature engine on the Gaussian model integral in `d = 1`.
/// The exact value is `√(π/(1 − it)) e^{−x²/(4(1 − it))}`.
pub fn gaussian_calibration(x: f64, t: f64, tol: f64) -> Result<GaussianCalibration> {
    if !(x.is_finite() && t.is_finite() && tol > 0.0) {
        return Err(LabError::InvalidInput("calibration needs finite x, t and a positive tolerance".into()));
    }
    // e^{−ξ²} is below 1e−18 outside [−6.5, 6.5]
    let cut = 6.5 + x.abs() / 2.0;
    let amp = |r: f64| Complex64::new((-r * r).exp(), 0.0);
    let ph = move |r: f64| x * r + t * r * r;
    let dph = move |r: f64| x + 2.0 * t * r;
    let piece = Piece { amp: &amp, phase: &ph, dphase: &dph };
    let mut total = QuadResult::default();
    // split at the stationary point so every panel has a one-signed phase derivative
    let stat = if t != 0.0 { -x / (2.0 * t) } else { f64::NAN };
    if stat > -cut && stat < cut {
        total.absorb(integrate(&piece, -cut, stat, tol / 2.0, QuadOptions::default()));
        total.absorb(integrate(&piece, stat, cut, tol / 2.0, QuadOptions::default()));
    } else {
        total.absorb(integrate(&piece, -cut, cut, tol, QuadOptions::default()));
    }
    if !total.converged {
        return Err(LabError::Numerical(format!("calibration at t = {t} did not converge")));
    }
    let z = Complex64::new(1.0, -t);
    let exact = (Complex64::new(std::f64::consts::PI, 0.0) / z).sqrt() * (-(x * x) / (4.0 * z)).exp();
    Ok(GaussianCalibration { quadrature: total.value, exact, error_estimate: total.error })
}

/// `ε^{±[−αd/2 + i d(2−α)κ]}`, the prefactor relating scale `ε` to scale 1.
pub fn rescale_factor(kind: OscKind, d: u32, alpha: f64, kappa: f64, eps: f64) -> Complex64 {
    let sign = if kind == OscKind::AlmostHomPlus { 1.0 } else { -1.0 };
    let df = d as f64;
    let e = Complex64::new(-alpha * df / 2.0, df * (2.0 - alpha) * kappa) * sign;
    (e * eps.ln()).exp()
}

/// Maximum relative gap between `ℐ^{φ,±}_ε(x,t)` and its rescaled scale-1 form
/// `ε^{±[−αd/2 + i d(2−α)κ]} ℐ^{φ_{ε^{∓1}},±}_1(ε^{∓1}x, ε^{∓α}t)`.
pub fn rescale_identity_check(
    spec: &OscIntegralSpec,
    epsilons: &[f64],
    samples: &[(f64, f64)],
    opts: EvalOptions,
) -> Result<f64> {
    if !matches!(spec.kind, OscKind::AlmostHomPlus | OscKind::AlmostHomMinus) {
        return Err(LabError::InvalidInput("rescale check applies to the almost-homogeneous kinds".into()));
    }
    spec.validate()?;
    let phi = spec.phi.clone().unwrap();
    let alpha = phi.alpha;
    let plus = spec.kind == OscKind::AlmostHomPlus;
    let mut worst: f64 = 0.0;
    for &eps in epsilons {
        let s = if plus { 1.0 / eps } else { eps };
        let lhs_spec = spec.clone().with_epsilon(eps);
        let rhs_spec = spec.clone().with_epsilon(1.0).with_symbol(phi.rescaled(s));
        let lhs = lhs_spec.radial()?;
        let rhs = rhs_spec.radial()?;
        let factor = rescale_factor(spec.kind, spec.d, alpha, spec.kappa, eps);
        for &(x, t) in samples {
            let l = lhs.eval(x, t, opts);
            let r = rhs.eval(s * x, t * s.powf(alpha), opts);
            if !(l.converged && r.converged) {
                return Err(LabError::Numerical("rescale check quadrature did not converge".into()));
            }
            let gap = (l.value - factor * r.value).norm() / l.value.norm().max(f64::MIN_POSITIVE);
            worst = worst.max(gap);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(kind: OscKind) -> OscIntegralSpec {
        let alpha = if kind == OscKind::AlmostHomPlus { 2.0 } else { -1.0 };
        OscIntegralSpec::new(kind, 1, 0.0).with_symbol(AlmostHomogeneousSymbol::homogeneous(alpha).unwrap())
    }

    #[test]
    fn gaussian_calibration_matches_closed_form() {
        for t in [0.0, 1.0, 7.5, 100.0, 1e4] {
            for x in [0.0, 1.3, -4.0] {
                let c = gaussian_calibration(x, t, 1e-12).unwrap();
                assert!(c.gap() < 1e-8 * c.exact.norm().max(1e-300) + 1e-12, "x = {x}, t = {t}: {}", c.gap());
            }
            let c = gaussian_calibration(0.0, t, 1e-12).unwrap();
            let modulus = std::f64::consts::PI.sqrt() * (1.0 + t * t).powf(-0.25);
            assert!((c.quadrature.norm() - modulus).abs() < 1e-10);
        }
    }

    #[test]
    fn calibration_rejects_bad_input() {
        assert!(gaussian_calibration(f64::NAN, 1.0, 1e-10).is_err());
        assert!(gaussian_calibration(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn conjugation_symmetry() {
        let opts = EvalOptions::default();
        for (x, t, k) in [(0.4, 3.0, 1.5), (2.0, -7.0, -0.7), (0.0, 12.0, 3.0)] {
            let a = eval_oscillatory(&OscIntegralSpec::new(OscKind::WaveW, 2, k), &[x, 0.0], t, opts).unwrap();
            let b = eval_oscillatory(&OscIntegralSpec::new(OscKind::WaveW, 2, -k), &[-x, 0.0], -t, opts).unwrap();
            assert!((a.value.conj() - b.value).norm() <= 1e-8 * a.value.norm() + 1e-12);
        }
    }

    #[test]
    fn radial_dependence_only() {
        let spec = OscIntegralSpec::new(OscKind::KgK, 2, 1.0).with_epsilon(0.1);
        let opts = EvalOptions::default();
        let a = eval_oscillatory(&spec, &[3.0, 4.0], 5.0, opts).unwrap();
        let b = eval_oscillatory(&spec, &[0.0, -5.0], 5.0, opts).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn wave_kernel_in_three_dimensions_against_direct_radial_sum() {
        // d = 3: σ̂(z) = 4π sin z / z, so 𝒲_κ(x,t) is a plain 1-d integral on [0, 1]
        let (x, t, k) = (2.0, 3.0, 1.0);
        let spec = OscIntegralSpec::new(OscKind::WaveW, 3, k);
        let v = eval_oscillatory(&spec, &[x, 0.0, 0.0], t, EvalOptions::default()).unwrap().value;
        let n = 400_000;
        let h = 1.0 / n as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let r = (i as f64 + 0.5) * h;
            let sinc = (r * x).sin() / (r * x);
            s += Complex64::from_polar(4.0 * std::f64::consts::PI * sinc * r.powf(-2.0) * smooth_bump(r) * r * r * h, t * r + k * r.ln());
        }
        // midpoint error is dominated by the ρ^{iκ} oscillation at the origin
        assert!((v - s).norm() < 1e-4 * v.norm(), "{v} vs {s}");
    }

    #[test]
    fn zero_kappa_weighted_kernel_vanishes() {
        let spec = OscIntegralSpec::new(OscKind::WaveW, 2, 0.0);
        assert!(spec.kind.kappa_weighted());
        let v = eval_oscillatory(&spec, &[1.0, 0.0], 10.0, EvalOptions::default()).unwrap();
        assert_eq!((v.value * spec.kappa).norm(), 0.0);
    }

    #[test]
    fn tighter_tolerance_does_not_raise_error_estimate() {
        let r = OscIntegralSpec::new(OscKind::WaveW, 2, 1.0).radial().unwrap();
        let mut last = f64::INFINITY;
        for tol in [1e-6, 1e-8, 1e-10, 1e-12] {
            let v = r.eval_atol(25.0, 50.0, tol, QuadOptions::default());
            assert!(v.converged);
            assert!(v.error <= last * (1.0 + 1e-12));
            last = v.error;
        }
    }

    #[test]
    fn refinement_oracle_wave_d2() {
        let r = OscIntegralSpec::new(OscKind::WaveW, 2, 1.0).radial().unwrap();
        let a = r.eval_atol(0.0, 50.0, 1e-10, QuadOptions::default());
        let b = r.eval_atol(0.0, 50.0, 1e-13, QuadOptions { use_levin: false, ..QuadOptions::default() });
        assert!((a.value - b.value).norm() < 1e-6 * b.value.norm());
    }

    #[test]
    fn kg_k_scaled_magnitude_is_bounded() {
        for d in [1u32, 2] {
            for k in [0.0, 2.0, 8.0] {
                let spec = OscIntegralSpec::new(OscKind::KgK, d, k).with_epsilon(1e-2);
                let mut worst: f64 = 0.0;
                for t in [1.0, 10.0, 100.0, 1000.0] {
                    let mut x = vec![0.0; d as usize];
                    x[0] = 0.5 * t;
                    let v = eval_oscillatory(&spec, &x, t, EvalOptions::default()).unwrap();
                    worst = worst.max(v.value.norm() * t.powf(d as f64 / 2.0));
                }
                assert!(worst < 50.0 * (1.0 + k).powi(2), "d = {d}, κ = {k}: {worst}");
            }
        }
    }

    #[test]
    fn rescale_identity_is_exact_for_homogeneous_symbols() {
        let spec = quadratic(OscKind::AlmostHomPlus).with_epsilon(0.05);
        let gap = rescale_identity_check(&spec, &[1.0, 2.0, 0.5], &[(0.3, 2.0), (1.0, 5.0)], EvalOptions::default()).unwrap();
        assert!(gap < 1e-6, "{gap}");
    }

    #[test]
    fn kind_constraints_are_enforced() {
        let bad_plus = OscIntegralSpec::new(OscKind::AlmostHomPlus, 1, 0.0)
            .with_symbol(AlmostHomogeneousSymbol::homogeneous(-1.0).unwrap());
        assert!(bad_plus.validate().is_err());
        let bad_minus = OscIntegralSpec::new(OscKind::AlmostHomMinus, 1, 0.0)
            .with_symbol(AlmostHomogeneousSymbol::homogeneous(2.0).unwrap());
        assert!(bad_minus.validate().is_err());
        assert!(OscIntegralSpec::new(OscKind::AlmostHomPlus, 1, 0.0).validate().is_err());
        assert!(OscIntegralSpec::new(OscKind::KgK, 1, 0.0).with_epsilon(0.0).validate().is_err());
        assert!(OscIntegralSpec::new(OscKind::KgK, 1, 0.0).with_gamma(-1.0).validate().is_err());
        assert!(OscIntegralSpec::new(OscKind::WaveW, 1, 1.0).validate().is_err());
        assert!(rescale_identity_check(&OscIntegralSpec::new(OscKind::KgK, 1, 0.0), &[1.0], &[(0.0, 1.0)], EvalOptions::default()).is_err());
        assert!(quadratic(OscKind::AlmostHomMinus).validate().is_ok());
    }
}
