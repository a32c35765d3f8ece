//! Plot-ready series from a single trace.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qap_core::metrics::rolling_variance;

use crate::trace_file::RunRecord;

/// Window of the rolling variance of the best cost.
pub const ROLLING_WINDOW: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFiles {
    /// `iteration,best,mean,worst`
    pub convergence: PathBuf,
    /// `iteration,lambda`
    pub lambda: PathBuf,
    /// `iteration,variance`, one row per iteration from `window` onward.
    pub variance: PathBuf,
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes the three series of `rec` into `dir`, named after its trace file.
pub fn emit_series(rec: &RunRecord, dir: &Path, window: usize) -> Result<SeriesFiles> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = rec.file_name();
    let stem = name.trim_end_matches(".trace");
    let files = SeriesFiles {
        convergence: dir.join(format!("{stem}.convergence.csv")),
        lambda: dir.join(format!("{stem}.lambda.csv")),
        variance: dir.join(format!("{stem}.variance.csv")),
    };
    write_csv(
        &files.convergence,
        &["iteration", "best", "mean", "worst"],
        rec.trace.iter().map(|t| {
            vec![
                t.iteration.to_string(),
                t.best.to_string(),
                t.mean.to_string(),
                t.worst.to_string(),
            ]
        }),
    )?;
    write_csv(
        &files.lambda,
        &["iteration", "lambda"],
        rec.trace
            .iter()
            .map(|t| vec![t.iteration.to_string(), t.lambda.to_string()]),
    )?;
    let best: Vec<f64> = rec.trace.iter().map(|t| t.best as f64).collect();
    write_csv(
        &files.variance,
        &["iteration", "variance"],
        rolling_variance(&best, window)
            .into_iter()
            .enumerate()
            .map(|(k, v)| vec![(k + window).to_string(), v.to_string()]),
    )?;
    Ok(files)
}
