//! Run configuration shared by the command-line front end and the sweeps.
//!
//! A [`RunConfig`] is read from TOML or JSON, rejects unknown keys, and has a
//! canonical TOML form ([`RunConfig::canonical`]) that is embedded in the
//! header of every output file.  Parsing the canonical form gives back the
//! same configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::SolverConfig;

/// Uniform grid `[start, end]` with `n` points (`n = 1` means `start` only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(start: f64, end: f64, n: usize) -> Result<Self> {
        let g = Self { start, end, n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "grid needs finite bounds and n >= 1 (got [{}, {}], n = {})",
                self.start, self.end, self.n
            )));
        }
        if self.n > 1 && !(self.end > self.start) {
            return Err(Error::InvalidConfig(format!(
                "grid end {} must exceed start {}",
                self.end, self.start
            )));
        }
        Ok(())
    }

    /// The grid points `start + k (end − start)/(n − 1)`.
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.start];
        }
        let h = (self.end - self.start) / (self.n - 1) as f64;
        (0..self.n).map(|k| self.start + k as f64 * h).collect()
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: String,
    /// Initial-data file; `None` selects a built-in data set by `builtin`.
    #[serde(default)]
    pub data: Option<PathBuf>,
    /// Built-in data set: `"lorentzian"` or `"two-pole"`.
    #[serde(default)]
    pub builtin: Option<String>,
    pub t: GridSpec,
    pub x: GridSpec,
    #[serde(default)]
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_output() -> PathBuf {
    PathBuf::from(".")
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.t.validate()?;
        self.x.validate()?;
        if self.t.start <= 0.0 {
            return Err(Error::NonPositiveTime(self.t.start));
        }
        for (i, e) in self.epsilons.iter().enumerate() {
            if !(*e > 0.0 && e.is_finite()) {
                return Err(Error::InvalidConfig(format!("epsilon at index {i} must be positive, got {e}")));
            }
        }
        if self.data.is_some() && self.builtin.is_some() {
            return Err(Error::InvalidConfig("give either `data` or `builtin`, not both".into()));
        }
        if let Some(b) = &self.builtin {
            if b != "lorentzian" && b != "two-pole" {
                return Err(Error::InvalidConfig(format!(
                    "unknown built-in data set `{b}` (expected `lorentzian` or `two-pole`)"
                )));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        self.solver.validate()
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let c: Self = toml::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Reads TOML (or JSON when the extension is `.json`).
    pub fn from_path(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&s)
        } else {
            Self::from_toml_str(&s)
        }
    }

    /// Canonical TOML serialization.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("RunConfig always serializes")
    }
}
