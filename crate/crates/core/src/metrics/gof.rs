use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{QapError, Result};

/// Pearson chi-square test of iteration times against a uniform law.
/// A lower statistic means a more robust algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: f64,
    pub p_value: f64,
    pub bins: usize,
    pub samples: usize,
    /// Set when all samples coincide; the statistic is then 0.
    pub degenerate: bool,
}

/// `max(2, floor(sqrt(m)))`.
pub fn default_bins(samples: usize) -> usize {
    ((samples as f64).sqrt().floor() as usize).max(2)
}

/// Goodness of fit to the uniform law on `[min, max]` of the samples.
pub fn robustness_gof(lambdas: &[f64], bins: usize) -> Result<GofResult> {
    let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    chi_square_uniform(lambdas, lo, hi, bins)
}

/// Goodness of fit to the uniform law on an explicit range `[lo, hi]`,
/// using `bins` equal-width bins (the top edge belongs to the last bin).
pub fn chi_square_uniform(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Result<GofResult> {
    if bins < 2 {
        return Err(QapError::Config(format!(
            "need at least 2 bins, got {bins}"
        )));
    }
    let m = samples.len();
    if m < 5 * bins {
        return Err(QapError::InsufficientData(format!(
            "{m} samples for {bins} bins; need at least {}",
            5 * bins
        )));
    }
    if let Some(pos) = samples.iter().position(|x| !x.is_finite()) {
        return Err(QapError::NonFinite(pos));
    }
    if hi == lo {
        return Ok(GofResult {
            statistic: 0.0,
            p_value: 1.0,
            bins,
            samples: m,
            degenerate: true,
        });
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        if x < lo || x > hi {
            return Err(QapError::Contract(format!(
                "sample {x} outside [{lo}, {hi}]"
            )));
        }
        let k = (((x - lo) / width).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    let expected = m as f64 / bins as f64;
    let statistic: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dist = ChiSquared::new((bins - 1) as f64).expect("positive degrees of freedom");
    Ok(GofResult {
        statistic,
        p_value: dist.sf(statistic),
        bins,
        samples: m,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stratified_samples_fit_perfectly() {
        // 5 samples at each of the centers 0.5, 1.5, 2.5, 3.5
        let xs: Vec<f64> = (0..20).map(|k| 0.5 + (k % 4) as f64).collect();
        let r = robustness_gof(&xs, 4).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_mass_in_one_bin() {
        let xs = vec![0.5; 40];
        let r = chi_square_uniform(&xs, 0.0, 4.0, 4).unwrap();
        assert_eq!(r.statistic, 120.0);
        assert!(r.p_value < 1e-20);
    }

    #[test]
    fn degenerate_spread() {
        let r = robustness_gof(&[0.25; 30], 3).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.statistic, 0.0);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            robustness_gof(&[1.0, 2.0, 3.0], 2),
            Err(QapError::InsufficientData(_))
        ));
        assert!(matches!(
            robustness_gof(&[1.0; 20], 1),
            Err(QapError::Config(_))
        ));
    }

    #[test]
    fn bins_rule() {
        assert_eq!(default_bins(1), 2);
        assert_eq!(default_bins(100), 10);
        assert_eq!(default_bins(99), 9);
    }
}
