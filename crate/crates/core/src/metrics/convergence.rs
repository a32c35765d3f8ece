use serde::{Deserialize, Serialize};

use crate::error::{QapError, Result};

/// Tunables of the strong-convergence detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    /// Window length `n`.
    pub window: usize,
    /// Gap threshold `delta`.
    pub delta: f64,
    /// Number of sub-threshold checks `K` required.
    pub target: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            window: 50,
            delta: 1e-3,
            target: 10,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(QapError::Config("detector window must be positive".into()));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(QapError::Config(format!(
                "detector delta must be positive and finite, got {}",
                self.delta
            )));
        }
        if self.target == 0 {
            return Err(QapError::Config("detector target must be positive".into()));
        }
        Ok(())
    }
}

/// Strong-convergence detector over a stream of per-iteration best costs.
///
/// After each new value at iteration `i > n`, the coefficient of variation
/// (population std over mean) is taken for every full length-`n` window
/// ending at `t` in `(i - n, i]`. When the spread `max CV - min CV` is below
/// `delta`, the counter `k` grows; `k` is never reset. The run has converged
/// once `k >= K`.
#[derive(Debug, Clone)]
pub struct ConvergenceDetector {
    config: DetectorConfig,
    values: Vec<f64>,
    /// `cvs[t - n]` is the CV of the window ending at 1-based iteration `t`.
    cvs: Vec<f64>,
    k: usize,
    trigger_iteration: Option<usize>,
}

impl ConvergenceDetector {
    pub fn new(config: DetectorConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            values: Vec::new(),
            cvs: Vec::new(),
            k: 0,
            trigger_iteration: None,
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    /// Number of values observed so far (the current iteration index `i`).
    pub fn iteration(&self) -> usize {
        self.values.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn converged(&self) -> bool {
        self.k >= self.config.target
    }

    /// First iteration at which `k` reached the target.
    pub fn trigger_iteration(&self) -> Option<usize> {
        self.trigger_iteration
    }

    /// Feeds the best cost of the next iteration; returns whether `k` grew.
    pub fn step(&mut self, best: f64) -> Result<bool> {
        if !best.is_finite() || best < 0.0 {
            return Err(QapError::Contract(format!(
                "best cost must be finite and non-negative, got {best}"
            )));
        }
        let n = self.config.window;
        self.values.push(best);
        let i = self.values.len();
        if i >= n {
            let cv = window_cv(&self.values[i - n..])?;
            self.cvs.push(cv);
        }
        if i <= n {
            return Ok(false);
        }
        // windows ending at t = max(n, i - n + 1) ..= i
        let first_t = n.max(i + 1 - n);
        let span = &self.cvs[first_t - n..];
        let max = span.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = span.iter().copied().fold(f64::INFINITY, f64::min);
        if max - min < self.config.delta {
            self.k += 1;
            if self.trigger_iteration.is_none() && self.converged() {
                self.trigger_iteration = Some(i);
            }
            return Ok(true);
        }
        Ok(false)
    }
}

fn window_cv(window: &[f64]) -> Result<f64> {
    let mean = super::mean(window);
    let std = super::population_variance(window).sqrt();
    if mean == 0.0 {
        return if std == 0.0 {
            Ok(0.0)
        } else {
            Err(QapError::UndefinedCv)
        };
    }
    Ok(std / mean)
}
