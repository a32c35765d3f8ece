//! Experiment configuration file.
//!
//! ```toml
//! instances = ["data/scr15.dat"]
//! replications = 10
//! seed = 42
//! output_dir = "out"
//! workers = 4
//! formats = ["csv", "json"]
//! half_count = true
//!
//! [detector]
//! window = 50
//! delta = 1e-3
//! target = 10
//!
//! [[algorithms]]
//! name = "sa"
//! max_iterations = 200
//! sa = { cooling_alpha = 0.95 }
//! ```
//!
//! Each algorithm entry starts from the bundled defaults for the instance size
//! and overlays any other keys it carries onto the matching solver fields.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qap_core::metrics::DetectorConfig;
use qap_core::{Algorithm, SolverConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmEntry {
    pub name: String,
    /// Solver fields to override, e.g. `max_iterations` or `sa = { ... }`.
    #[serde(flatten)]
    pub overrides: toml::Table,
}

impl AlgorithmEntry {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            name: algorithm.tag().to_string(),
            overrides: toml::Table::new(),
        }
    }

    pub fn with_override(mut self, key: &str, value: impl Into<toml::Value>) -> Self {
        self.overrides.insert(key.to_string(), value.into());
        self
    }

    pub fn algorithm(&self) -> Result<Algorithm> {
        Ok(self.name.parse()?)
    }

    /// Defaults for an instance of size `n` with this entry's overrides applied.
    pub fn solver_config(&self, n: usize, seed: u64) -> Result<SolverConfig> {
        let base = SolverConfig::defaults_for(self.algorithm()?, n);
        let mut table = toml::Table::try_from(&base).context("serializing solver defaults")?;
        for (key, value) in &self.overrides {
            if matches!(key.as_str(), "algorithm" | "seed" | "detector") {
                anyhow::bail!("{}: `{key}` cannot be overridden per algorithm", self.name);
            }
            match (table.get_mut(key), value) {
                (Some(toml::Value::Table(dst)), toml::Value::Table(src)) => {
                    for (k, v) in src {
                        if !dst.contains_key(k) {
                            anyhow::bail!("{}: unknown parameter `{key}.{k}`", self.name);
                        }
                        dst.insert(k.clone(), v.clone());
                    }
                }
                (Some(dst), v) if !dst.is_table() => *dst = v.clone(),
                (Some(_), _) => anyhow::bail!("{}: `{key}` must be a table", self.name),
                (None, _) => anyhow::bail!("{}: unknown parameter `{key}`", self.name),
            }
        }
        let cfg: SolverConfig = toml::Value::Table(table)
            .try_into()
            .with_context(|| format!("{}: invalid parameter value", self.name))?;
        cfg.validate()
            .with_context(|| format!("{}: invalid parameters", self.name))?;
        Ok(cfg.with_seed(seed))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instances: Vec<PathBuf>,
    pub algorithms: Vec<AlgorithmEntry>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub detector: DetectorConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<ReportFormat>,
    /// Also emit every cost column halved.
    #[serde(default)]
    pub half_count: bool,
    /// Read the first matrix of each instance file as distances and the
    /// second as flows.
    #[serde(default)]
    pub swap_matrices: bool,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_replications() -> usize {
    10
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Csv, ReportFormat::Json]
}

fn default_workers() -> usize {
    1
}

/// All violations found in a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Violations(pub Vec<String>);

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration:")?;
        for v in &self.0 {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Violations {}

impl ExperimentConfig {
    pub fn new(instances: Vec<PathBuf>, algorithms: Vec<AlgorithmEntry>) -> Self {
        Self {
            instances,
            algorithms,
            replications: default_replications(),
            seed: 0,
            detector: DetectorConfig::default(),
            output_dir: default_output_dir(),
            formats: default_formats(),
            half_count: false,
            swap_matrices: false,
            workers: default_workers(),
        }
    }

    /// Reads a TOML file; relative instance paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: Self =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in &mut cfg.instances {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Violations> {
        let mut errs = Vec::new();
        if self.replications == 0 {
            errs.push("replications must be at least 1".to_string());
        }
        if self.instances.is_empty() {
            errs.push("at least one instance is required".to_string());
        }
        if self.algorithms.is_empty() {
            errs.push("at least one algorithm is required".to_string());
        }
        if self.workers == 0 {
            errs.push("workers must be at least 1".to_string());
        }
        if self.formats.is_empty() {
            errs.push("at least one report format is required".to_string());
        }
        if let Err(e) = self.detector.validate() {
            errs.push(e.to_string());
        }
        let mut seen = BTreeSet::new();
        for entry in &self.algorithms {
            match entry.solver_config(1, 0) {
                Ok(cfg) => {
                    if !seen.insert(cfg.algorithm) {
                        errs.push(format!("algorithm {} listed twice", cfg.algorithm));
                    }
                }
                Err(e) => errs.push(format!("{e:#}")),
            }
        }
        let mut names = BTreeSet::new();
        for p in &self.instances {
            let name = instance_name(p);
            if !names.insert(name.clone()) {
                errs.push(format!("two instances share the name {name:?}"));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Violations(errs))
        }
    }

    /// Seed of replication `r`; independent of how many replications run.
    pub fn replication_seed(&self, r: usize) -> u64 {
        replication_seed(self.seed, r)
    }
}

/// Instance name used in reports and file names: the lower-cased file stem.
pub fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().to_lowercase())
        .unwrap_or_default()
}

/// `master ^ splitmix64(r)`.
pub fn replication_seed(master: u64, r: usize) -> u64 {
    master ^ splitmix64(r as u64)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
