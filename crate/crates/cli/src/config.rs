//! Experiment configs: a TOML file with `kind`, `seed`, `output_dir` and
//! the typed tables `[parameters]` and `[tolerances]`.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Exponents,
    Oscdecay,
    Sharpness,
    Duality,
    Refined,
    Kinetic,
    Semiclassical,
    Hartree,
}

impl Kind {
    /// Kinds whose sampling draws from the seed.
    pub fn randomized(&self) -> bool {
        matches!(self, Kind::Duality | Kind::Refined)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub kind: Kind,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub parameters: toml::Table,
    #[serde(default)]
    pub tolerances: toml::Table,
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(CliError::parse)
    }

    pub fn params<P: DeserializeOwned>(&self) -> CliResult<P> {
        toml::Value::Table(self.parameters.clone())
            .try_into()
            .map_err(|e| CliError::parse(format!("[parameters]: {e}")))
    }

    pub fn tols<T: DeserializeOwned>(&self) -> CliResult<T> {
        toml::Value::Table(self.tolerances.clone())
            .try_into()
            .map_err(|e| CliError::parse(format!("[tolerances]: {e}")))
    }

    pub fn require_seed(&self) -> CliResult<u64> {
        self.seed.ok_or_else(|| CliError::parse(format!("kind {:?} is randomized and needs a seed", self.kind)))
    }
}
