//! Exact arithmetic for admissibility, regularity and summability exponents.
//!
//! Every quantity here is a rational number or `+∞`; no floating point is
//! involved in any classification, so equalities such as sharp admissibility
//! are decided exactly.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{LabError, Result};

/// A Lebesgue-type exponent in `[1, ∞]` (or any rational), with `∞` carried as
/// its own variant whose reciprocal is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational64),
    Infinite,
}

impl Exponent {
    pub fn int(n: i64) -> Self {
        Exponent::Finite(Rational64::from_integer(n))
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Exponent::Finite(Rational64::new(num, den))
    }

    /// Exponent whose reciprocal is `inv`; a zero reciprocal gives `∞`.
    pub fn from_reciprocal(inv: Rational64) -> Self {
        if inv.is_zero() {
            Exponent::Infinite
        } else {
            Exponent::Finite(inv.recip())
        }
    }

    pub fn recip(&self) -> Rational64 {
        match self {
            Exponent::Finite(v) => v.recip(),
            Exponent::Infinite => Rational64::zero(),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(v) => *v.numer() as f64 / *v.denom() as f64,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// Parses `"4"`, `"8/3"`, `"inf"` or `"∞"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" || s.eq_ignore_ascii_case("infinity") {
            return Ok(Exponent::Infinite);
        }
        parse_rational(s).map(Exponent::Finite)
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Exponent::Infinite, Exponent::Infinite) => Ordering::Equal,
            (Exponent::Infinite, _) => Ordering::Greater,
            (_, Exponent::Infinite) => Ordering::Less,
            (Exponent::Finite(a), Exponent::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) if v.is_integer() => write!(f, "{}", v.numer()),
            Exponent::Finite(v) => write!(f, "{}/{}", v.numer(), v.denom()),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || LabError::Parse(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(n, d));
    }
    if let Ok(n) = s.parse::<i64>() {
        return Ok(Rational64::from_integer(n));
    }
    // decimal literal such as "0.5" is taken literally, not as a float
    let (int_part, frac_part) = s.split_once('.').ok_or_else(bad)?;
    let neg = int_part.starts_with('-');
    let digits = frac_part.len() as u32;
    if digits > 15 || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let den = 10i64.pow(digits);
    let ip: i64 = if int_part.is_empty() || int_part == "-" {
        0
    } else {
        int_part.parse().map_err(|_| bad())?
    };
    let fp: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
    let mag = ip.abs() * den + fp;
    Ok(Rational64::new(if neg { -mag } else { mag }, den))
}

pub fn rat_to_f64(v: Rational64) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

fn half() -> Rational64 {
    Rational64::new(1, 2)
}

/// Trichotomy for a pair `(q, r)` relative to `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Admissibility {
    Sharp,
    NonSharp,
    Inadmissible,
}

fn check_lebesgue(name: &str, e: Exponent) -> Result<()> {
    if e < Exponent::int(2) {
        return Err(LabError::InvalidInput(format!("{name} = {e} must be at least 2")));
    }
    Ok(())
}

/// Compares `1/q` with `σ(1/2 − 1/r)`.
pub fn classify_pair(q: Exponent, r: Exponent, sigma: Rational64) -> Result<Admissibility> {
    check_lebesgue("q", q)?;
    check_lebesgue("r", r)?;
    if !sigma.is_positive() {
        return Err(LabError::InvalidInput(format!("sigma = {sigma} must be positive")));
    }
    let rhs = sigma * (half() - r.recip());
    Ok(match q.recip().cmp(&rhs) {
        Ordering::Equal => Admissibility::Sharp,
        Ordering::Less => Admissibility::NonSharp,
        Ordering::Greater => Admissibility::Inadmissible,
    })
}

/// Solves `σ/β = 1/q + 2σ/r`; `β = ∞` when the right side vanishes.
pub fn beta_sigma(q: Exponent, r: Exponent, sigma: Rational64) -> Result<Exponent> {
    check_lebesgue("q", q)?;
    check_lebesgue("r", r)?;
    if !sigma.is_positive() {
        return Err(LabError::InvalidInput(format!("sigma = {sigma} must be positive")));
    }
    let rhs = q.recip() + Rational64::from_integer(2) * sigma * r.recip();
    Ok(Exponent::from_reciprocal(rhs / sigma))
}

/// Dispersive equation whose scaling fixes the Sobolev regularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "equation")]
pub enum Equation {
    Fractional { alpha: Rational64Ser },
    Wave,
    KleinGordonWave,
    KleinGordonSchrodinger,
}

/// Serializable wrapper so rationals appear as `"p/q"` strings in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational64Ser(pub Rational64);

impl Serialize for Rational64Ser {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&Exponent::Finite(self.0).to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SobolevExponent {
    #[serde(serialize_with = "ser_rat")]
    pub s: Rational64,
    /// For the fractional equation: whether `d/r + α/q < d` holds.
    pub technical_constraint: Option<bool>,
}

fn ser_rat<S: Serializer>(v: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&Exponent::Finite(*v).to_string())
}

pub fn sobolev_exponent(d: u32, equation: Equation, q: Exponent, r: Exponent) -> Result<SobolevExponent> {
    if d == 0 {
        return Err(LabError::InvalidInput("dimension must be at least 1".into()));
    }
    let dd = Rational64::from_integer(d as i64);
    let base = dd * half() - dd * r.recip();
    let out = match equation {
        Equation::Fractional { alpha: Rational64Ser(alpha) } => {
            if alpha.is_zero() || alpha == Rational64::one() {
                return Err(LabError::InvalidInput(format!("alpha = {alpha} is excluded (0 and 1)")));
            }
            SobolevExponent {
                s: base - alpha * q.recip(),
                technical_constraint: Some(dd * r.recip() + alpha * q.recip() < dd),
            }
        }
        Equation::Wave | Equation::KleinGordonWave => {
            SobolevExponent { s: base - q.recip(), technical_constraint: None }
        }
        Equation::KleinGordonSchrodinger => SobolevExponent {
            s: base - (dd - Rational64::from_integer(2)) / dd * q.recip(),
            technical_constraint: None,
        },
    };
    Ok(out)
}

/// Named points of the `(1/r, 1/q)` square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Vertex {
    O,
    A,
    B,
    C,
    D,
    E,
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Vertex::O => "O",
            Vertex::A => "A_sigma",
            Vertex::B => "B_sigma",
            Vertex::C => "C",
            Vertex::D => "D",
            Vertex::E => "E_sigma",
        };
        f.write_str(s)
    }
}

pub type Point = (Rational64, Rational64);

/// The points `O, A_σ, B_σ, C, D, E_σ` for a fixed `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionGeometry {
    pub sigma: Rational64,
}

impl RegionGeometry {
    pub fn new(sigma: Rational64) -> Result<Self> {
        if sigma < half() {
            return Err(LabError::InvalidInput(format!("sigma = {sigma} must be at least 1/2")));
        }
        Ok(Self { sigma })
    }

    pub fn has_e(&self) -> bool {
        self.sigma >= Rational64::one()
    }

    pub fn vertex(&self, v: Vertex) -> Result<Point> {
        let s = self.sigma;
        let one = Rational64::one();
        let two = Rational64::from_integer(2);
        Ok(match v {
            Vertex::O => (Rational64::zero(), Rational64::zero()),
            Vertex::A => ((two * s - one) / (two * (two * s + one)), s / (two * s + one)),
            Vertex::B => {
                let b = s / (two * (s + one));
                (b, b)
            }
            Vertex::C => (half(), Rational64::zero()),
            Vertex::D => (Rational64::zero(), half()),
            Vertex::E => {
                if !self.has_e() {
                    return Err(LabError::InvalidInput(format!(
                        "E_sigma requires sigma >= 1, got {s}"
                    )));
                }
                ((s - one) / (two * s), half())
            }
        })
    }
}

/// One membership fact for a point of the square.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "at")]
pub enum RegionLabel {
    Vertex(Vertex),
    /// Open segment between two named points.
    Segment(Vertex, Vertex),
    /// Interior of the convex hull of the listed points.
    Interior(Vec<Vertex>),
    Outside,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionLabel::Vertex(v) => write!(f, "vertex {v}"),
            RegionLabel::Segment(a, b) => write!(f, "segment ({a},{b})"),
            RegionLabel::Interior(vs) => {
                let names: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                write!(f, "int({})", names.join(""))
            }
            RegionLabel::Outside => write!(f, "outside"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionMembership {
    /// Most specific label: vertex, then segment, then the smallest interior.
    pub primary: RegionLabel,
    pub all: Vec<RegionLabel>,
}

fn cross(o: Point, a: Point, p: Point) -> Rational64 {
    (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0)
}

fn on_open_segment(a: Point, b: Point, p: Point) -> bool {
    if a == b || !cross(a, b, p).is_zero() {
        return false;
    }
    let dot = (p.0 - a.0) * (b.0 - a.0) + (p.1 - a.1) * (b.1 - a.1);
    let len2 = (b.0 - a.0) * (b.0 - a.0) + (b.1 - a.1) * (b.1 - a.1);
    dot.is_positive() && dot < len2
}

/// Strict interior test for a convex polygon given in either orientation.
fn in_open_convex(poly: &[Point], p: Point) -> bool {
    let n = poly.len();
    let mut sign = 0i32;
    for i in 0..n {
        let c = cross(poly[i], poly[(i + 1) % n], p);
        let s = if c.is_positive() {
            1
        } else if c.is_negative() {
            -1
        } else {
            return false;
        };
        if sign == 0 {
            sign = s;
        } else if s != sign {
            return false;
        }
    }
    true
}

/// Decides where `(1/r, 1/q)` lies relative to the named regions.
pub fn region_membership(sigma: Rational64, q: Exponent, r: Exponent) -> Result<RegionMembership> {
    check_lebesgue("q", q)?;
    check_lebesgue("r", r)?;
    let geo = RegionGeometry::new(sigma)?;
    let p = (r.recip(), q.recip());

    let mut vertices = vec![Vertex::O, Vertex::A, Vertex::B, Vertex::C, Vertex::D];
    if geo.has_e() {
        vertices.push(Vertex::E);
    }
    let mut all = Vec::new();
    for v in &vertices {
        if geo.vertex(*v)? == p {
            all.push(RegionLabel::Vertex(*v));
        }
    }

    let mut segments = vec![
        (Vertex::O, Vertex::A),
        (Vertex::A, Vertex::B),
        (Vertex::B, Vertex::C),
        (Vertex::A, Vertex::C),
        (Vertex::O, Vertex::C),
        (Vertex::O, Vertex::B),
        (Vertex::O, Vertex::D),
    ];
    if geo.has_e() {
        segments.extend([(Vertex::D, Vertex::E), (Vertex::E, Vertex::A)]);
    }
    for (a, b) in segments {
        if on_open_segment(geo.vertex(a)?, geo.vertex(b)?, p) {
            all.push(RegionLabel::Segment(a, b));
        }
    }

    let mut regions = vec![vec![Vertex::O, Vertex::A, Vertex::B], vec![Vertex::O, Vertex::A, Vertex::C]];
    if geo.has_e() {
        regions.push(vec![Vertex::O, Vertex::D, Vertex::E, Vertex::A]);
    }
    for verts in regions {
        let poly: Vec<Point> = verts.iter().map(|v| geo.vertex(*v)).collect::<Result<_>>()?;
        if in_open_convex(&poly, p) {
            all.push(RegionLabel::Interior(verts));
        }
    }

    let primary = all
        .iter()
        .find(|l| matches!(l, RegionLabel::Vertex(_)))
        .or_else(|| {
            // the shortest containing segment is the most specific
            all.iter().find(|l| matches!(l, RegionLabel::Segment(Vertex::A, Vertex::B) | RegionLabel::Segment(Vertex::B, Vertex::C)))
        })
        .or_else(|| all.iter().find(|l| matches!(l, RegionLabel::Segment(..))))
        .or_else(|| all.iter().find(|l| matches!(l, RegionLabel::Interior(_))))
        .cloned()
        .unwrap_or(RegionLabel::Outside);
    if all.is_empty() {
        all.push(RegionLabel::Outside);
    }
    Ok(RegionMembership { primary, all })
}

/// The two necessary upper bounds on `β`: `(β_{d/2}(q,r), q/2)`.
pub fn necessary_beta_bounds(d: u32, q: Exponent, r: Exponent) -> Result<(Exponent, Exponent)> {
    if d == 0 {
        return Err(LabError::InvalidInput("dimension must be at least 1".into()));
    }
    let scaling = beta_sigma(q, r, Rational64::new(d as i64, 2))?;
    let time = match q {
        Exponent::Finite(v) => Exponent::Finite(v / 2),
        Exponent::Infinite => Exponent::Infinite,
    };
    Ok((scaling, time))
}

/// Status of `β = 2r/(r+2)` as an upper limit on the summability exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaSharpness {
    /// Matches the necessary scaling bound, so no larger `β` is possible.
    Necessary,
    /// Sharp line of the wave-type exponent; optimality is unresolved.
    Conjectured,
    NotApplicable,
}

pub fn beta_sharpness(d: u32, sigma: Rational64, q: Exponent, r: Exponent) -> Result<BetaSharpness> {
    if classify_pair(q, r, sigma)? != Admissibility::Sharp || q.is_infinite() {
        return Ok(BetaSharpness::NotApplicable);
    }
    let dd = Rational64::from_integer(d as i64);
    let beta = beta_sigma(q, r, sigma)?;
    let (scaling, _) = necessary_beta_bounds(d, q, r)?;
    if sigma == dd / 2 || beta == scaling {
        Ok(BetaSharpness::Necessary)
    } else if sigma == (dd - Rational64::one()) / 2 {
        Ok(BetaSharpness::Conjectured)
    } else {
        Ok(BetaSharpness::NotApplicable)
    }
}

/// Convenience constructors for the admissibility parameters used throughout.
pub mod sigma {
    use num_rational::Rational64;

    use crate::error::{LabError, Result};

    /// Wave-type `(d−1)/2`.
    pub fn wave(d: u32) -> Rational64 {
        Rational64::new(d as i64 - 1, 2)
    }

    /// Schrödinger-type `d/2`.
    pub fn schrodinger(d: u32) -> Rational64 {
        Rational64::new(d as i64, 2)
    }

    /// `(d−1)/2 + ρ` for `ρ ∈ [0, 1/2]`.
    pub fn intermediate(d: u32, rho: Rational64) -> Result<Rational64> {
        if rho < Rational64::from_integer(0) || rho > Rational64::new(1, 2) {
            return Err(LabError::InvalidInput(format!("rho = {rho} outside [0, 1/2]")));
        }
        Ok(wave(d) + rho)
    }
}

/// Everything reported for a single `(d, σ, q, r)` query.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentPoint {
    pub d: u32,
    #[serde(serialize_with = "ser_rat")]
    pub sigma: Rational64,
    pub q: Exponent,
    pub r: Exponent,
    pub class: Admissibility,
    pub s: Option<SobolevExponent>,
    pub beta: Exponent,
    pub beta_status: BetaSharpness,
    pub region: Option<RegionMembership>,
    pub beta_bounds: (Exponent, Exponent),
}

impl ExponentPoint {
    pub fn evaluate(
        d: u32,
        sigma: Rational64,
        q: Exponent,
        r: Exponent,
        equation: Option<Equation>,
    ) -> Result<Self> {
        let class = classify_pair(q, r, sigma)?;
        let beta = beta_sigma(q, r, sigma)?;
        let s = equation.map(|eq| sobolev_exponent(d, eq, q, r)).transpose()?;
        let region = if sigma >= half() { Some(region_membership(sigma, q, r)?) } else { None };
        Ok(Self {
            d,
            sigma,
            q,
            r,
            class,
            s,
            beta,
            beta_status: beta_sharpness(d, sigma, q, r)?,
            region,
            beta_bounds: necessary_beta_bounds(d, q, r)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn keel_tao_endpoint_is_sharp() {
        let d = 3;
        let q = Exponent::int(2);
        let rr = Exponent::frac(2 * d, d - 2);
        assert_eq!(classify_pair(q, rr, r(d, 2)).unwrap(), Admissibility::Sharp);
    }

    #[test]
    fn energy_pair_is_sharp_for_any_sigma() {
        for s in [r(1, 2), r(1, 1), r(7, 3)] {
            assert_eq!(
                classify_pair(Exponent::Infinite, Exponent::int(2), s).unwrap(),
                Admissibility::Sharp
            );
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_pair(Exponent::int(10), Exponent::int(4), r(1, 1)).unwrap(),
            Admissibility::NonSharp
        );
        assert_eq!(
            classify_pair(Exponent::int(2), Exponent::int(4), r(1, 1)).unwrap(),
            Admissibility::Inadmissible
        );
        assert!(classify_pair(Exponent::frac(3, 2), Exponent::int(4), r(1, 1)).is_err());
        assert!(classify_pair(Exponent::int(4), Exponent::int(1), r(1, 1)).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_sigma(Exponent::int(4), Exponent::int(4), r(1, 1)).unwrap(), Exponent::frac(4, 3));
        for s in [r(1, 3), r(1, 1), r(5, 2)] {
            assert_eq!(beta_sigma(Exponent::Infinite, Exponent::int(2), s).unwrap(), Exponent::int(1));
        }
        let b = beta_sigma(Exponent::frac(8, 3), Exponent::int(4), r(3, 2)).unwrap();
        assert_eq!(b, Exponent::frac(4, 3));
        assert_eq!(b, Exponent::frac(2 * 4, 4 + 2));
        assert_eq!(
            beta_sigma(Exponent::Infinite, Exponent::Infinite, r(1, 1)).unwrap(),
            Exponent::Infinite
        );
    }

    #[test]
    fn sobolev_examples() {
        let w = sobolev_exponent(3, Equation::Wave, Exponent::int(3), Exponent::int(6)).unwrap();
        assert_eq!(w.s, r(2, 3));
        assert_eq!(w.s, r(4, 2) * (r(1, 2) - r(1, 6)));

        // sharp d/2-admissible pair with alpha = 2: (8, 4) in d = 1
        let f = sobolev_exponent(
            1,
            Equation::Fractional { alpha: Rational64Ser(r(2, 1)) },
            Exponent::int(8),
            Exponent::int(4),
        )
        .unwrap();
        assert_eq!(f.s, r(0, 1));
        assert_eq!(f.technical_constraint, Some(true));

        let kg = sobolev_exponent(2, Equation::KleinGordonSchrodinger, Exponent::int(7), Exponent::int(2)).unwrap();
        assert_eq!(kg.s, r(0, 1));

        for bad in [r(0, 1), r(1, 1)] {
            assert!(sobolev_exponent(
                2,
                Equation::Fractional { alpha: Rational64Ser(bad) },
                Exponent::int(4),
                Exponent::int(4)
            )
            .is_err());
        }
    }

    #[test]
    fn region_examples() {
        let s = r(3, 2);
        let geo = RegionGeometry::new(s).unwrap();
        let a = geo.vertex(Vertex::A).unwrap();
        let mid = (a.0 / 2, a.1 / 2);
        let m = region_membership(s, Exponent::from_reciprocal(mid.1), Exponent::from_reciprocal(mid.0)).unwrap();
        assert_eq!(m.primary, RegionLabel::Segment(Vertex::O, Vertex::A));

        let m = region_membership(s, Exponent::Infinite, Exponent::int(2)).unwrap();
        assert_eq!(m.primary, RegionLabel::Vertex(Vertex::C));

        let m = region_membership(s, Exponent::int(8), Exponent::int(4)).unwrap();
        assert_eq!(m.primary, RegionLabel::Interior(vec![Vertex::O, Vertex::A, Vertex::C]));
        assert_eq!(m.all.len(), 1);
    }

    #[test]
    fn b_sigma_lies_on_sharp_line() {
        for s in [r(1, 2), r(1, 1), r(3, 2), r(5, 2)] {
            let geo = RegionGeometry::new(s).unwrap();
            let (x, y) = geo.vertex(Vertex::B).unwrap();
            assert_eq!(y, s * (r(1, 2) - x));
        }
    }

    #[test]
    fn e_sigma_requires_sigma_at_least_one() {
        let geo = RegionGeometry::new(r(3, 4)).unwrap();
        assert!(geo.vertex(Vertex::E).is_err());
        assert!(RegionGeometry::new(r(1, 3)).is_err());
    }

    #[test]
    fn necessary_bounds_examples() {
        assert_eq!(
            necessary_beta_bounds(2, Exponent::int(4), Exponent::int(4)).unwrap(),
            (Exponent::frac(4, 3), Exponent::int(2))
        );
        // Keel–Tao endpoint in d = 3: β_{3/2}(2, 6) = 3/2
        let (b, t) = necessary_beta_bounds(3, Exponent::int(2), Exponent::int(6)).unwrap();
        assert_eq!(b, beta_sigma(Exponent::int(2), Exponent::int(6), r(3, 2)).unwrap());
        assert_eq!(b, Exponent::frac(3, 2));
        assert_eq!(t, Exponent::int(1));
        assert_eq!(
            necessary_beta_bounds(5, Exponent::Infinite, Exponent::int(2)).unwrap(),
            (Exponent::int(1), Exponent::Infinite)
        );
    }

    #[test]
    fn beta_status_labels() {
        // sharp wave line in d = 3 (σ = 1): (4, 4)
        assert_eq!(
            beta_sharpness(3, r(1, 1), Exponent::int(4), Exponent::int(4)).unwrap(),
            BetaSharpness::Conjectured
        );
        assert_eq!(
            beta_sharpness(2, r(1, 1), Exponent::int(4), Exponent::int(4)).unwrap(),
            BetaSharpness::Necessary
        );
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Exponent::parse("8/3").unwrap(), Exponent::frac(8, 3));
        assert_eq!(Exponent::parse("inf").unwrap(), Exponent::Infinite);
        assert_eq!(Exponent::parse("0.25").unwrap(), Exponent::frac(1, 4));
        assert!(Exponent::parse("x").is_err());
    }
}
