//! Benchmark harness around `qap_core`: configuration, replicated runs,
//! trace files, summary reports and plot series.

pub mod config;
pub mod report;
pub mod runner;
pub mod series;
pub mod trace_file;

use std::path::Path;

use anyhow::{Context, Result};
use qap_core::{brute_force, Assignment, QapInstance};
use serde::Serialize;

pub use config::{AlgorithmEntry, ExperimentConfig, ReportFormat};
pub use report::{ReportRow, Table2Row, TimingRow};
pub use runner::{regenerate_reports, run_experiment, ReportSummary, RunSummary};
pub use series::{emit_series, SeriesFiles};
pub use trace_file::RunRecord;

/// Reads a QAPLIB file, optionally exchanging the roles of its two matrices.
pub fn load_instance(path: &Path, swap_matrices: bool) -> Result<QapInstance> {
    let inst = QapInstance::from_path(path)
        .with_context(|| format!("reading instance {}", path.display()))?
        .with_context(|| format!("parsing instance {}", path.display()))?;
    let inst = if swap_matrices { inst.swapped() } else { inst };
    Ok(inst.named(config::instance_name(path)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleOutput {
    pub instance: String,
    pub n: usize,
    pub cost: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_half: Option<f64>,
    pub assignment: Assignment,
}

/// Exact optimum by enumeration; refuses instances above the size cap.
pub fn oracle(path: &Path, swap_matrices: bool, half_count: bool) -> Result<OracleOutput> {
    let inst = load_instance(path, swap_matrices)?;
    let (assignment, cost) =
        brute_force(&inst).with_context(|| format!("solving {}", path.display()))?;
    Ok(OracleOutput {
        instance: inst.name().to_string(),
        n: inst.n(),
        cost: cost.0,
        cost_half: half_count.then(|| cost.half()),
        assignment,
    })
}
