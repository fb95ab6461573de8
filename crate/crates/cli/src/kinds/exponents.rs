//! Exact exponent queries: class, `β`, Sobolev index and region per `(q, r)`.

use dispersive_lab::exponents::{
    beta_sigma, necessary_beta_bounds, parse_rational, sigma, Admissibility, Equation, Exponent, ExponentPoint, Rational64Ser,
};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::config::{Config, Kind};
use crate::error::{CliError, CliResult};
use crate::table::{Cell, Table};
use crate::{Check, Derived, Outcome};

pub const HEADER: &[&str] = &["d", "sigma", "q", "r", "class", "beta", "s", "region", "beta_scaling", "beta_time"];
pub const TEXT: &[&str] = &["sigma", "q", "r", "class", "beta", "s", "region", "beta_scaling", "beta_time"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationName {
    Fractional,
    Wave,
    KleinGordonWave,
    KleinGordonSchrodinger,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub d: u32,
    /// Rational string; defaults to `d/2`.
    pub sigma: Option<String>,
    /// `[q, r]` pairs as strings such as `"8/3"` or `"inf"`.
    pub pairs: Vec<[String; 2]>,
    pub equation: Option<EquationName>,
    /// Order of the fractional equation.
    pub alpha: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tols {}

struct Parsed {
    sigma: Rational64,
    pairs: Vec<(Exponent, Exponent)>,
    equation: Option<Equation>,
}

fn parse(p: &Params) -> CliResult<Parsed> {
    if p.d == 0 || p.d > 3 {
        return Err(CliError::parse(format!("d = {} must be 1, 2 or 3", p.d)));
    }
    let sigma = match &p.sigma {
        Some(s) => parse_rational(s)?,
        None => sigma::schrodinger(p.d),
    };
    if p.pairs.is_empty() {
        return Err(CliError::parse("pairs is empty"));
    }
    let pairs = p
        .pairs
        .iter()
        .map(|[q, r]| Ok((Exponent::parse(q)?, Exponent::parse(r)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let equation = match (p.equation, &p.alpha) {
        (None, None) => None,
        (None, Some(_)) => return Err(CliError::parse("alpha given without equation = \"fractional\"")),
        (Some(EquationName::Fractional), Some(a)) => Some(Equation::Fractional { alpha: Rational64Ser(parse_rational(a)?) }),
        (Some(EquationName::Fractional), None) => return Err(CliError::parse("the fractional equation needs alpha")),
        (Some(_), Some(_)) => return Err(CliError::parse("alpha applies to the fractional equation only")),
        (Some(EquationName::Wave), None) => Some(Equation::Wave),
        (Some(EquationName::KleinGordonWave), None) => Some(Equation::KleinGordonWave),
        (Some(EquationName::KleinGordonSchrodinger), None) => Some(Equation::KleinGordonSchrodinger),
    };
    Ok(Parsed { sigma, pairs, equation })
}

fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

pub fn evaluate(d: u32, sigma: Rational64, pairs: &[(Exponent, Exponent)], equation: Option<Equation>) -> CliResult<Vec<ExponentPoint>> {
    pairs.iter().map(|&(q, r)| Ok(ExponentPoint::evaluate(d, sigma, q, r, equation)?)).collect()
}

pub fn run(cfg: &Config) -> CliResult<Outcome> {
    let params: Params = cfg.params()?;
    let tols: Tols = cfg.tols()?;
    let parsed = parse(&params)?;
    let points = evaluate(params.d, parsed.sigma, &parsed.pairs, parsed.equation)?;

    let mut table = Table::new(HEADER);
    let sigma_text = Exponent::Finite(parsed.sigma).to_string();
    let mut bad_sharp = 0usize;
    for p in &points {
        if p.class == Admissibility::Sharp {
            let expected = if p.r.is_infinite() {
                Exponent::int(2)
            } else {
                Exponent::from_reciprocal((p.r.recip() * 2 + 1) / 2)
            };
            if p.beta != expected {
                bad_sharp += 1;
            }
        }
        table.push(vec![
            Cell::Num(p.d as f64),
            Cell::Text(sigma_text.clone()),
            Cell::Text(p.q.to_string()),
            Cell::Text(p.r.to_string()),
            Cell::Text(label(&p.class)),
            Cell::Text(p.beta.to_string()),
            Cell::Text(p.s.map(|s| Exponent::Finite(s.s).to_string()).unwrap_or_default()),
            Cell::Text(p.region.as_ref().map(|m| m.primary.to_string()).unwrap_or_default()),
            Cell::Text(p.beta_bounds.0.to_string()),
            Cell::Text(p.beta_bounds.1.to_string()),
        ]);
    }
    let checks = vec![Check::new(
        "sharp_rows_with_beta_off_2r/(r+2)",
        bad_sharp as f64,
        "== 0".into(),
        bad_sharp == 0,
    )];
    super::finish(Kind::Exponents, "summability exponent β(q, r) and admissibility class", &params, &tols, table, super::to_json(&points), checks)
}

/// Per row: the recorded `β` and bounds as floats, and `β` recomputed from `(σ, q, r)`.
pub fn derive(table: &Table) -> CliResult<Derived> {
    let col = |n: &str| table.column(n);
    let (cs, cq, cr, cb, cc) = (col("sigma")?, col("q")?, col("r")?, col("beta")?, col("class")?);
    let (cbs, cbt, cd) = (col("beta_scaling")?, col("beta_time")?, col("d")?);
    let mut out = Derived::new();
    let mut sharp = 0.0;
    for i in 0..table.rows.len() {
        let sigma = parse_rational(table.text(i, cs)?)?;
        let q = Exponent::parse(table.text(i, cq)?)?;
        let r = Exponent::parse(table.text(i, cr)?)?;
        let d = table.num(i, cd)?;
        if d.fract() != 0.0 || !(1.0..=3.0).contains(&d) {
            return Err(CliError::parse(format!("row {i}: bad dimension {d}")));
        }
        out.insert(format!("row{i}:beta"), Exponent::parse(table.text(i, cb)?)?.to_f64());
        out.insert(format!("row{i}:beta_recomputed"), beta_sigma(q, r, sigma)?.to_f64());
        let (bs, bt) = necessary_beta_bounds(d as u32, q, r)?;
        out.insert(format!("row{i}:beta_scaling"), Exponent::parse(table.text(i, cbs)?)?.to_f64());
        out.insert(format!("row{i}:beta_scaling_recomputed"), bs.to_f64());
        out.insert(format!("row{i}:beta_time"), Exponent::parse(table.text(i, cbt)?)?.to_f64());
        out.insert(format!("row{i}:beta_time_recomputed"), bt.to_f64());
        if table.text(i, cc)? == "sharp" {
            sharp += 1.0;
        }
    }
    out.insert("sharp_rows".into(), sharp);
    Ok(out)
}
