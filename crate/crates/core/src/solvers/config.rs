use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{QapError, Result};
use crate::metrics::DetectorConfig;

/// Versioned default parameters per instance-size band.
pub const DEFAULTS_TOML: &str = include_str!("../../defaults/solver-defaults-v1.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Lsh,
    Ga,
    Pso,
    GaPso,
    Gwo,
    Hs,
    Sa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Ga,
        Algorithm::Pso,
        Algorithm::GaPso,
        Algorithm::Gwo,
        Algorithm::Hs,
        Algorithm::Sa,
        Algorithm::Lsh,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Lsh => "lsh",
            Algorithm::Ga => "ga",
            Algorithm::Pso => "pso",
            Algorithm::GaPso => "ga-pso",
            Algorithm::Gwo => "gwo",
            Algorithm::Hs => "hs",
            Algorithm::Sa => "sa",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = QapError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| QapError::Config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaParams {
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Relative weights of insertion, inversion and exchange mutation.
    pub mutation_mix: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsoParams {
    pub inertia: f64,
    pub c1_start: f64,
    pub c1_end: f64,
    pub c2_start: f64,
    pub c2_end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GwoParams {
    pub a_start: f64,
    pub a_end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsParams {
    pub hms: usize,
    pub hmcr: f64,
    pub par: f64,
    pub bandwidth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaParams {
    pub t0_acceptance_ratio: f64,
    pub cooling_alpha: f64,
    pub moves_per_temperature: usize,
    /// Skips calibration and starts at this temperature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_temperature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub max_iterations: usize,
    pub population_size: usize,
    pub seed: u64,
    pub ga: GaParams,
    pub pso: PsoParams,
    pub gwo: GwoParams,
    pub hs: HsParams,
    pub sa: SaParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector: Option<DetectorConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DefaultsFile {
    version: u32,
    band: Vec<Band>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Band {
    max_n: usize,
    lsh: Budget,
    ga: Budget,
    pso: Budget,
    ga_pso: Budget,
    gwo: Budget,
    hs: Budget,
    sa: Budget,
    ga_params: GaParams,
    pso_params: PsoParams,
    gwo_params: GwoParams,
    hs_params: HsParams,
    sa_params: SaParams,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct Budget {
    max_iterations: usize,
    population_size: usize,
}

fn defaults_file() -> &'static DefaultsFile {
    static FILE: OnceLock<DefaultsFile> = OnceLock::new();
    FILE.get_or_init(|| {
        let file: DefaultsFile = toml::from_str(DEFAULTS_TOML).expect("bundled defaults parse");
        assert_eq!(file.version, 1);
        file
    })
}

impl SolverConfig {
    /// Bundled defaults for an instance of size `n`.
    pub fn defaults_for(algorithm: Algorithm, n: usize) -> Self {
        let file = defaults_file();
        let band = file
            .band
            .iter()
            .find(|b| n <= b.max_n)
            .unwrap_or_else(|| file.band.last().expect("at least one band"));
        let budget = match algorithm {
            Algorithm::Lsh => band.lsh,
            Algorithm::Ga => band.ga,
            Algorithm::Pso => band.pso,
            Algorithm::GaPso => band.ga_pso,
            Algorithm::Gwo => band.gwo,
            Algorithm::Hs => band.hs,
            Algorithm::Sa => band.sa,
        };
        Self {
            algorithm,
            max_iterations: budget.max_iterations,
            population_size: budget.population_size,
            seed: 0,
            ga: band.ga_params,
            pso: band.pso_params,
            gwo: band.gwo_params,
            hs: band.hs_params,
            sa: band.sa_params,
            detector: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_population(mut self, population_size: usize) -> Self {
        self.population_size = population_size;
        self
    }

    /// Checks every invariant and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut prob = |name: &str, v: f64| {
            if !(0.0..=1.0).contains(&v) {
                errs.push(format!("{name} must lie in [0, 1], got {v}"));
            }
        };
        prob("ga.crossover_rate", self.ga.crossover_rate);
        prob("ga.mutation_rate", self.ga.mutation_rate);
        prob("hs.hmcr", self.hs.hmcr);
        prob("hs.par", self.hs.par);
        if self.max_iterations == 0 {
            errs.push("max_iterations must be at least 1".into());
        }
        if self.population_size == 0 {
            errs.push("population_size must be at least 1".into());
        }
        if self.hs.hms == 0 {
            errs.push("hs.hms must be at least 1".into());
        }
        if self.sa.moves_per_temperature == 0 {
            errs.push("sa.moves_per_temperature must be at least 1".into());
        }
        let mix = self.ga.mutation_mix;
        if mix.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || mix.iter().sum::<f64>() <= 0.0 {
            errs.push(format!(
                "ga.mutation_mix needs non-negative weights with a positive sum, got {mix:?}"
            ));
        }
        let p = &self.pso;
        if p.c1_end > p.c1_start {
            errs.push(format!(
                "pso.c1_end ({}) must not exceed c1_start ({})",
                p.c1_end, p.c1_start
            ));
        }
        if p.c2_end > p.c2_start {
            errs.push(format!(
                "pso.c2_end ({}) must not exceed c2_start ({})",
                p.c2_end, p.c2_start
            ));
        }
        if [p.inertia, p.c1_start, p.c1_end, p.c2_start, p.c2_end]
            .iter()
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            errs.push("pso coefficients must be finite and non-negative".into());
        }
        if !(self.gwo.a_start >= self.gwo.a_end && self.gwo.a_end >= 0.0) {
            errs.push(format!(
                "gwo.a must decrease from a_start to a_end >= 0, got {} -> {}",
                self.gwo.a_start, self.gwo.a_end
            ));
        }
        if !(self.hs.bandwidth >= 0.0 && self.hs.bandwidth.is_finite()) {
            errs.push(format!(
                "hs.bandwidth must be finite and non-negative, got {}",
                self.hs.bandwidth
            ));
        }
        let sa = &self.sa;
        if !(sa.t0_acceptance_ratio > 0.0 && sa.t0_acceptance_ratio < 1.0) {
            errs.push(format!(
                "sa.t0_acceptance_ratio must lie in (0, 1), got {}",
                sa.t0_acceptance_ratio
            ));
        }
        if !(sa.cooling_alpha > 0.0 && sa.cooling_alpha <= 1.0) {
            errs.push(format!(
                "sa.cooling_alpha must lie in (0, 1], got {}",
                sa.cooling_alpha
            ));
        }
        if let Some(t) = sa.initial_temperature {
            if !(t > 0.0 && t.is_finite()) {
                errs.push(format!("sa.initial_temperature must be positive, got {t}"));
            }
        }
        if let Some(det) = &self.detector {
            if let Err(e) = det.validate() {
                errs.push(e.to_string());
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(QapError::Config(errs.join("; ")))
        }
    }
}
