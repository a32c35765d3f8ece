//! Evaluation framework: iteration traces, per-iteration time statistics,
//! goodness-of-fit robustness, the strong-convergence detector and the
//! replication aggregates behind the summary tables.

mod aggregate;
mod convergence;
mod gof;
mod lambda;

pub use aggregate::{
    aggregate_replications, run_level, table2_summary, ConvergenceReport, ConvergenceSummary,
    RunLevel, RunStatistics, Triple,
};
pub use convergence::{ConvergenceDetector, DetectorConfig};
pub use gof::{chi_square_uniform, default_bins, robustness_gof, GofResult};
pub use lambda::{lambda_stats, lambda_stats_from_deltas, LambdaStats};

use serde::{Deserialize, Serialize};

/// One iteration of a solver run.
///
/// `best`, `mean` and `worst` summarize the candidates of this iteration;
/// `incumbent` is the best objective seen so far; `lambda` is the wall time
/// of the iteration body in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iteration: usize,
    pub best: i64,
    pub mean: f64,
    pub worst: i64,
    pub incumbent: i64,
    pub lambda: f64,
}

impl IterationTrace {
    /// Same record with the timing zeroed, for comparisons across runs.
    pub fn without_timing(mut self) -> Self {
        self.lambda = 0.0;
        self
    }
}

/// Summary of the candidate costs evaluated in one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateStats {
    pub best: i64,
    pub mean: f64,
    pub worst: i64,
}

impl CandidateStats {
    pub fn from_costs<I: IntoIterator<Item = i64>>(costs: I) -> Option<Self> {
        let mut count = 0usize;
        let mut sum = 0f64;
        let mut best = i64::MAX;
        let mut worst = i64::MIN;
        for c in costs {
            count += 1;
            sum += c as f64;
            best = best.min(c);
            worst = worst.max(c);
        }
        (count > 0).then(|| Self {
            best,
            mean: (sum / count as f64).clamp(best as f64, worst as f64),
            worst,
        })
    }
}

/// Population variance in double precision, computed around the mean.
pub(crate) fn population_variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance of the trailing `window` values ending at each index
/// from `window - 1` onward.
pub fn rolling_variance(values: &[f64], window: usize) -> Vec<f64> {
    if window == 0 || values.len() < window {
        return Vec::new();
    }
    values.windows(window).map(population_variance).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidate_stats_bracket() {
        let s = CandidateStats::from_costs([5, 9, 1, 3]).unwrap();
        assert_eq!((s.best, s.worst), (1, 9));
        assert_eq!(s.mean, 4.5);
        assert!(CandidateStats::from_costs(std::iter::empty()).is_none());
    }

    #[test]
    fn rolling_variance_of_constant_is_zero() {
        let v = rolling_variance(&[3.0; 60], 50);
        assert_eq!(v.len(), 11);
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn variance_small_case() {
        assert_eq!(population_variance(&[10.0, 14.0]), 4.0);
    }
}
