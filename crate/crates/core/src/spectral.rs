//! Periodic-grid propagators, Fourier multipliers and Littlewood–Paley pieces.
//!
//! Positions are `x_i = −L/2 + i·h` with `h = L/n`. The frequency
//! representation approximates the continuum transform
//! `f̂(ξ) = ∫ e^{−ix·ξ} f(x) dx` at `ξ = 2πk/L`, so
//! `h^d Σ|f|² = L^{−d} Σ|f̂|²`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::dispersion::DispersionRelation;
use crate::error::{LabError, Result};
use crate::oscillatory::bump::{annulus_bump, smooth_bump};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub d: usize,
    pub n: usize,
    pub box_len: f64,
}

impl Grid {
    pub fn new(d: usize, n: usize, box_len: f64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(LabError::InvalidInput(format!("grid dimension {d} not in 1..=3")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(LabError::InvalidInput(format!("n = {n} must be a power of two, at least 8")));
        }
        if !(box_len > 0.0 && box_len.is_finite()) {
            return Err(LabError::InvalidInput(format!("box length {box_len} must be positive")));
        }
        Ok(Self { d, n, box_len })
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.box_len / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    pub fn volume(&self) -> f64 {
        self.box_len.powi(self.d as i32)
    }

    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.box_len + i as f64 * self.spacing()
    }

    /// Signed wavenumber of FFT slot `i`, in `[−n/2, n/2)`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.box_len
    }

    /// Axis indices of a flat index; the last axis varies fastest.
    pub fn multi_index(&self, mut flat: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for a in (0..self.d).rev() {
            out[a] = flat % self.n;
            flat /= self.n;
        }
        out
    }

    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for a in 0..self.d {
            x[a] = self.coord(idx[a]);
        }
        x
    }

    pub fn frequency(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut xi = [0.0; 3];
        for a in 0..self.d {
            xi[a] = self.wavenumber(idx[a]) as f64 * self.frequency_step();
        }
        xi
    }

    pub fn frequency_norm(&self, flat: usize) -> f64 {
        let xi = self.frequency(flat);
        xi[..self.d].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `(−1)^{Σk}`, the phase from centring the box at the origin.
    fn centring_sign(&self, flat: usize) -> f64 {
        let idx = self.multi_index(flat);
        let s: i64 = idx[..self.d].iter().map(|&i| self.wavenumber(i)).sum();
        if s.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn max_frequency(&self) -> f64 {
        (self.n as f64 / 2.0) * self.frequency_step() * (self.d as f64).sqrt()
    }

    /// Dyadic indices `j ≥ 1` whose piece `χ_j` can meet a grid frequency.
    pub fn lp_high_range(&self) -> std::ops::RangeInclusive<i32> {
        let top = (self.max_frequency().log2().ceil() as i32 + 1).max(1);
        1..=top
    }

    /// All dyadic indices whose piece meets a nonzero grid frequency.
    pub fn lp_full_range(&self) -> std::ops::RangeInclusive<i32> {
        let bottom = self.frequency_step().log2().floor() as i32 - 1;
        bottom..=*self.lp_high_range().end()
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, dir))
}

/// Unnormalized multi-dimensional FFT in place.
pub(crate) fn fft_nd(grid: &Grid, data: &mut [Complex64], dir: FftDirection) {
    let n = grid.n;
    let fft = plan(n, dir);
    let total = grid.len();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..grid.d {
        let stride = n.pow((grid.d - 1 - axis) as u32);
        if stride == 1 {
            fft.process(data);
            continue;
        }
        let block = stride * n;
        for start in (0..total).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + k * stride];
                }
                fft.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}

/// Complex samples on a periodic grid.
#[derive(Debug, Clone)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    /// Set when a multiplier singular at `ξ = 0` removed the zero mode.
    pub zero_mode_dropped: bool,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::InvalidInput(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, zero_mode_dropped: false, spectrum: OnceLock::new() })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::new(grid, vec![Complex64::new(0.0, 0.0); grid.len()]).unwrap()
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.position(i)[..grid.d])).collect();
        Self::new(grid, values).unwrap()
    }

    /// Builds a field from samples of its continuum Fourier transform.
    pub fn from_spectrum_fn(grid: Grid, fhat: impl Fn(&[f64]) -> Complex64) -> Self {
        let spec: Vec<Complex64> = (0..grid.len()).map(|i| fhat(&grid.frequency(i)[..grid.d])).collect();
        Self::from_spectrum(grid, spec).unwrap()
    }

    pub fn from_spectrum(grid: Grid, spectrum: Vec<Complex64>) -> Result<Self> {
        if spectrum.len() != grid.len() {
            return Err(LabError::InvalidInput("spectrum length does not match grid".into()));
        }
        let scale = 1.0 / grid.volume();
        let mut data: Vec<Complex64> =
            spectrum.iter().enumerate().map(|(i, v)| v * grid.centring_sign(i)).collect();
        fft_nd(&grid, &mut data, FftDirection::Inverse);
        for v in data.iter_mut() {
            *v *= scale;
        }
        let out = Self::new(grid, data)?;
        let _ = out.spectrum.set(spectrum);
        Ok(out)
    }

    /// Continuum-normalized transform, computed once and cached.
    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| {
            let mut data = self.values.clone();
            fft_nd(&self.grid, &mut data, FftDirection::Forward);
            let h = self.grid.cell_volume();
            for (i, v) in data.iter_mut().enumerate() {
                *v *= h * self.grid.centring_sign(i);
            }
            data
        })
    }

    /// `(∫|f|^p)^{1/p}` with the grid measure; `p = ∞` gives the max.
    pub fn lebesgue_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        let h = self.grid.cell_volume();
        (h * self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>()).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_volume() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `(2π)^{−d} ∫|f̂|²` on the frequency lattice.
    pub fn l2_norm_from_spectrum(&self) -> f64 {
        (self.spectrum().iter().map(|v| v.norm_sqr()).sum::<f64>() / self.grid.volume()).sqrt()
    }

    /// `⟨f, g⟩ = ∫ f ḡ`.
    pub fn inner(&self, other: &Field) -> Complex64 {
        let h = self.grid.cell_volume();
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<Complex64>() * h
    }

    pub fn scale(&self, c: Complex64) -> Field {
        Field::new(self.grid, self.values.iter().map(|v| v * c).collect()).unwrap()
    }

    pub fn add(&self, other: &Field) -> Field {
        Field::new(self.grid, self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect()).unwrap()
    }

    pub fn sub(&self, other: &Field) -> Field {
        Field::new(self.grid, self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect()).unwrap()
    }

    /// Multiplies the spectrum by `m(flat index)`.
    pub fn apply_diagonal(&self, m: impl Fn(usize) -> Complex64) -> Field {
        let mut data = self.values.clone();
        fft_nd(&self.grid, &mut data, FftDirection::Forward);
        for (i, v) in data.iter_mut().enumerate() {
            *v *= m(i);
        }
        fft_nd(&self.grid, &mut data, FftDirection::Inverse);
        let inv = 1.0 / self.grid.len() as f64;
        for v in data.iter_mut() {
            *v *= inv;
        }
        let mut out = Field::new(self.grid, data).unwrap();
        out.zero_mode_dropped = self.zero_mode_dropped;
        out
    }

    /// Radial multiplier `m(|ξ|)`.
    pub fn apply_radial(&self, m: impl Fn(f64) -> Complex64) -> Field {
        let grid = self.grid;
        self.apply_diagonal(|i| m(grid.frequency_norm(i)))
    }

    fn zero_mode_is_small(&self) -> bool {
        let s = self.spectrum();
        let total: f64 = s.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        s[0].norm() <= 1e-12 * total.max(f64::MIN_POSITIVE)
    }
}

/// `e^{itφ(D)} f`. Symbols singular at the origin drop the zero mode and flag it.
pub fn propagate(f: &Field, phi: &DispersionRelation, t: f64) -> Field {
    let singular = phi.profile(0.0).is_infinite();
    let mut out = f.apply_radial(|rho| {
        let p = phi.profile(rho);
        if p.is_infinite() {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(1.0, t * p)
        }
    });
    if singular && !f.zero_mode_is_small() {
        out.zero_mode_dropped = true;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Multiplier {
    /// `|ξ|^s`.
    Homogeneous { s: f64 },
    /// `⟨ξ⟩^s`.
    Inhomogeneous { s: f64 },
    /// Square root of `Θ_{−1}(ξ) = |ξ|^{−(d+1)(1/2−1/r)} χ²(|ξ|)`.
    Theta { d: u32, r: f64 },
}

impl Multiplier {
    pub fn symbol(&self, rho: f64) -> f64 {
        match *self {
            Multiplier::Homogeneous { s } => {
                if s == 0.0 {
                    1.0
                } else {
                    rho.powf(s)
                }
            }
            Multiplier::Inhomogeneous { s } => (1.0 + rho * rho).powf(s / 2.0),
            Multiplier::Theta { d, r } => {
                let e = -((d + 1) as f64) * (0.5 - 1.0 / r) / 2.0;
                let c = smooth_bump(rho);
                if c == 0.0 {
                    0.0
                } else if e == 0.0 {
                    c
                } else {
                    rho.powf(e) * c
                }
            }
        }
    }

    fn singular_at_zero(&self) -> bool {
        self.symbol(0.0).is_infinite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroMode {
    #[default]
    Reject,
    Annihilate,
}

pub fn multiplier(f: &Field, m: Multiplier, zero_mode: ZeroMode) -> Result<Field> {
    let singular = m.singular_at_zero();
    if singular && zero_mode == ZeroMode::Reject && !f.zero_mode_is_small() {
        return Err(LabError::InvalidInput(
            "negative power at a nonzero zero mode; opt into annihilation".into(),
        ));
    }
    let mut out = f.apply_radial(|rho| {
        let v = m.symbol(rho);
        Complex64::new(if v.is_finite() { v } else { 0.0 }, 0.0)
    });
    if singular && !f.zero_mode_is_small() {
        out.zero_mode_dropped = true;
    }
    Ok(out)
}

/// `P_j f` via `χ₀(2^{−j}|ξ|)`.
pub fn littlewood_paley(f: &Field, j: i32) -> Field {
    let s = 2f64.powi(-j);
    f.apply_radial(|rho| Complex64::new(annulus_bump(s * rho), 0.0))
}

/// `P_{≤0} f` via `χ(|ξ|/2) = Σ_{j≤0} χ_j`.
pub fn lp_low(f: &Field) -> Field {
    f.apply_radial(|rho| Complex64::new(smooth_bump(0.5 * rho), 0.0))
}

/// `‖f − P_{≤0}f − Σ_{j≥1} P_j f‖₂ / ‖f‖₂`.
pub fn lp_reconstruct(f: &Field) -> f64 {
    let mut acc = lp_low(f);
    for j in f.grid.lp_high_range() {
        acc = acc.add(&littlewood_paley(f, j));
    }
    let norm = f.l2_norm();
    if norm == 0.0 {
        return 0.0;
    }
    f.sub(&acc).l2_norm() / norm
}

/// Time samples of a field on one grid.
#[derive(Debug, Clone)]
pub struct SpacetimeField {
    pub times: Vec<f64>,
    pub slices: Vec<Field>,
}

impl SpacetimeField {
    pub fn new(times: Vec<f64>, slices: Vec<Field>) -> Result<Self> {
        if times.len() != slices.len() || times.is_empty() {
            return Err(LabError::InvalidInput("times and slices must be nonempty and of equal length".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::InvalidInput("times must be strictly increasing".into()));
        }
        let g = slices[0].grid;
        if slices.iter().any(|s| s.grid != g) {
            return Err(LabError::InvalidInput("slices must share one grid".into()));
        }
        Ok(Self { times, slices })
    }

    pub fn evolve(f: &Field, phi: &DispersionRelation, times: &[f64]) -> Result<Self> {
        let slices = times.iter().map(|&t| propagate(f, phi, t)).collect();
        Self::new(times.to_vec(), slices)
    }

    pub fn grid(&self) -> Grid {
        self.slices[0].grid
    }
}

/// Little-endian container: `d: u32, n: u32, L: f64, time: f64`, then re/im pairs.
pub fn encode_field(f: &Field, time: f64) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 16 * f.values.len());
    out.extend_from_slice(&(f.grid.d as u32).to_le_bytes());
    out.extend_from_slice(&(f.grid.n as u32).to_le_bytes());
    out.extend_from_slice(&f.grid.box_len.to_le_bytes());
    out.extend_from_slice(&time.to_le_bytes());
    for v in &f.values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn decode_field(bytes: &[u8]) -> Result<(Field, f64)> {
    let short = || LabError::Parse("field container truncated".into());
    if bytes.len() < 24 {
        return Err(short());
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let grid = Grid::new(u32_at(0) as usize, u32_at(4) as usize, f64_at(8))?;
    let time = f64_at(16);
    if bytes.len() != 24 + 16 * grid.len() {
        return Err(short());
    }
    let values = (0..grid.len())
        .map(|i| Complex64::new(f64_at(24 + 16 * i), f64_at(32 + 16 * i)))
        .collect();
    Ok((Field::new(grid, values)?, time))
}

pub fn save_field(path: &Path, f: &Field, time: f64) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(&encode_field(f, time))?;
    Ok(())
}

pub fn load_field(path: &Path) -> Result<(Field, f64)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_field(&bytes)
}
