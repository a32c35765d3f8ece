use serde::{Deserialize, Serialize};

use super::IterationTrace;
use crate::error::{QapError, Result};

/// Per-iteration time statistics in seconds.
///
/// `lambda_mean` averages the `S - 1` measured deltas. `lambda_mean_literal`
/// divides the same sum by the `S` recorded iterations instead; it is kept
/// for comparison with published tables and can fall below `lambda_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaStats {
    pub lambda_min: f64,
    pub lambda_mean: f64,
    pub lambda_max: f64,
    pub lambda_mean_literal: f64,
    pub samples: usize,
}

/// Statistics over the deltas between consecutive iterations. The first
/// iteration's time is excluded, so a trace needs at least two iterations.
pub fn lambda_stats(trace: &[IterationTrace]) -> Result<LambdaStats> {
    if trace.len() < 2 {
        return Err(QapError::InsufficientData(format!(
            "lambda statistics need at least 2 iterations, got {}",
            trace.len()
        )));
    }
    let deltas: Vec<f64> = trace[1..].iter().map(|t| t.lambda).collect();
    lambda_stats_from_deltas(&deltas)
}

/// Statistics over `S - 1` deltas `lambda_2 ..= lambda_S`.
pub fn lambda_stats_from_deltas(deltas: &[f64]) -> Result<LambdaStats> {
    if deltas.is_empty() {
        return Err(QapError::InsufficientData(
            "lambda statistics need at least one delta".into(),
        ));
    }
    if let Some(pos) = deltas.iter().position(|x| !x.is_finite() || *x < 0.0) {
        return Err(QapError::Contract(format!(
            "iteration time at position {pos} is negative or non-finite"
        )));
    }
    let sum: f64 = deltas.iter().sum();
    let min = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let max = deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let count = deltas.len() as f64;
    Ok(LambdaStats {
        lambda_min: min,
        lambda_mean: (sum / count).clamp(min, max),
        lambda_max: max,
        lambda_mean_literal: sum / (count + 1.0),
        samples: deltas.len(),
    })
}
