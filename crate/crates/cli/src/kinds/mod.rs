//! One module per experiment kind. Each exposes its CSV header, a `run`
//! that validates the config before computing anything, and a `derive`
//! that recomputes the reported statistics from the table alone.

pub mod duality;
pub mod exponents;
pub mod hartree;
pub mod kinetic;
pub mod oscdecay;
pub mod refined;
pub mod semiclassical;
pub mod sharpness;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Config, Kind};
use crate::error::{CliError, CliResult};
use crate::table::Table;
use crate::{with_column_sums, Derived, Outcome};

pub fn header(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Exponents => exponents::HEADER,
        Kind::Oscdecay => oscdecay::HEADER,
        Kind::Sharpness => sharpness::HEADER,
        Kind::Duality => duality::HEADER,
        Kind::Refined => refined::HEADER,
        Kind::Kinetic => kinetic::HEADER,
        Kind::Semiclassical => semiclassical::HEADER,
        Kind::Hartree => hartree::HEADER,
    }
}

/// Columns that hold strings rather than floats.
pub fn text_columns(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Exponents => exponents::TEXT,
        _ => &[],
    }
}

pub fn run(cfg: &Config) -> CliResult<Outcome> {
    if cfg.kind.randomized() {
        cfg.require_seed()?;
    }
    match cfg.kind {
        Kind::Exponents => exponents::run(cfg),
        Kind::Oscdecay => oscdecay::run(cfg),
        Kind::Sharpness => sharpness::run(cfg),
        Kind::Duality => duality::run(cfg),
        Kind::Refined => refined::run(cfg),
        Kind::Kinetic => kinetic::run(cfg),
        Kind::Semiclassical => semiclassical::run(cfg),
        Kind::Hartree => hartree::run(cfg),
    }
}

/// Statistics recomputed from `table`, including the column sums.
pub fn derive(kind: Kind, parameters: &Value, table: &Table) -> CliResult<Derived> {
    let own = match kind {
        Kind::Exponents => exponents::derive(table)?,
        Kind::Oscdecay => oscdecay::derive(&from_json(parameters)?, table)?,
        Kind::Sharpness => sharpness::derive(&from_json(parameters)?, table)?,
        Kind::Duality => duality::derive(table)?,
        Kind::Refined => refined::derive(table)?,
        Kind::Kinetic => kinetic::derive(table)?,
        Kind::Semiclassical => semiclassical::derive(table)?,
        Kind::Hartree => hartree::derive(table)?,
    };
    Ok(with_column_sums(own, table))
}

pub(crate) fn from_json<P: DeserializeOwned>(v: &Value) -> CliResult<P> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::parse(format!("recorded parameters: {e}")))
}

pub(crate) fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Assembles an outcome whose `derived` map comes from the same code path as replay.
pub(crate) fn finish<P: Serialize, T: Serialize>(
    kind: Kind,
    claim: &str,
    params: &P,
    tols: &T,
    table: Table,
    results: Value,
    checks: Vec<crate::Check>,
) -> CliResult<Outcome> {
    let parameters = to_json(params);
    let derived = derive(kind, &parameters, &table)?;
    Ok(Outcome { claim: claim.into(), parameters, tolerances: to_json(tols), table, results, checks, derived })
}

pub(crate) fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().cloned().fold(f64::MIN, f64::max);
    let lo = v.iter().cloned().fold(f64::MAX, f64::min);
    hi / lo
}
