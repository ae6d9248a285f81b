//! Optional JSON configuration. Command-line flags take precedence.

use crate::output::UsageError;
use anyhow::Result;
use serde::Deserialize;
use std::path::Path;

/// Largest `K` accepted when no configuration overrides it.
pub const DEFAULT_K_LIMIT: i32 = 8;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Upper bound on `K` for every subcommand.
    pub k_limit: Option<i32>,
    /// Default `--K-max` for `verify`.
    pub k_max: Option<i32>,
    /// Default `--tol` for `verify` and `simulate`.
    pub tol: Option<f64>,
    /// Worker threads when neither `--jobs` nor `HYPER3B_JOBS` is set.
    pub jobs: Option<usize>,
    /// Default number of trajectory samples for `simulate`.
    pub samples: Option<usize>,
    /// Default equilibrium hyperradius for `simulate harmonic`.
    pub rho0: Option<f64>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn k_limit(&self) -> i32 {
        self.k_limit.unwrap_or(DEFAULT_K_LIMIT)
    }
}
