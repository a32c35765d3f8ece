//! Summary tables built from run records.
//!
//! Three tables are written, each as CSV and/or JSON:
//!
//! - `table1`: per (instance, algorithm) quality statistics, columns
//!   `instance, algorithm, replications, best_obj, mean_best, mean_avg,
//!   mean_worst, var_best, var_avg, var_worst`, optionally followed by the
//!   same seven values computed on halved costs (`*_half`).
//! - `table2`: strong-convergence summary, columns `instance, algorithm,
//!   replications, converged, objective_{max,mean,min},
//!   iterations_{max,mean,min}, not_converged, window, delta, target`,
//!   optionally followed by `objective_half_{max,mean,min}`.
//! - `timing`: everything derived from wall-clock measurements (efficiency,
//!   mean run time, iteration-time statistics, robustness, time to
//!   convergence). Kept apart so the first two tables depend only on the
//!   configuration and seed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qap_core::metrics::{
    aggregate_replications, default_bins, lambda_stats_from_deltas, robustness_gof, table2_summary,
    ConvergenceReport, DetectorConfig, GofResult, LambdaStats, Triple,
};
use qap_core::{objective, Algorithm, Cost, QapInstance, SolverResult};
use serde::{Deserialize, Serialize};

use crate::config::ReportFormat;
use crate::trace_file::RunRecord;

/// Everything needed to rebuild the reports from trace files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub replications: usize,
    pub detector: DetectorConfig,
    pub half_count: bool,
    pub swap_matrices: bool,
    pub formats: Vec<ReportFormat>,
    pub instances: Vec<ManifestInstance>,
    pub algorithms: Vec<Algorithm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestInstance {
    pub name: String,
    pub path: PathBuf,
}

pub const MANIFEST_FILE: &str = "run.json";

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join(MANIFEST_FILE), self)
    }
}

/// Quality statistics on halved costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfColumns {
    pub best_obj: f64,
    pub mean_best: f64,
    pub mean_avg: f64,
    pub mean_worst: f64,
    pub var_best: f64,
    pub var_avg: f64,
    pub var_worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: String,
    pub algorithm: Algorithm,
    pub replications: usize,
    pub best_obj: i64,
    pub mean_best: f64,
    pub mean_avg: f64,
    pub mean_worst: f64,
    pub var_best: f64,
    pub var_avg: f64,
    pub var_worst: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half: Option<HalfColumns>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub instance: String,
    pub algorithm: Algorithm,
    pub replications: usize,
    pub converged: usize,
    pub objective: Triple,
    /// Over converged replications only.
    pub iterations: Option<Triple>,
    pub not_converged: Vec<usize>,
    pub detector: DetectorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective_half: Option<Triple>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub instance: String,
    pub algorithm: Algorithm,
    pub efficiency: Option<f64>,
    pub time: f64,
    pub lambda: Option<LambdaStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_note: Option<String>,
    pub robustness: Option<GofResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robustness_note: Option<String>,
    /// Time to convergence over converged replications.
    pub convergence_runtime: Option<Triple>,
}

/// A problem that kept a record or group out of the reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub instance: String,
    pub algorithm: Option<Algorithm>,
    pub replication: Option<usize>,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Reports {
    pub table1: Vec<ReportRow>,
    pub table2: Vec<Table2Row>,
    pub timing: Vec<TimingRow>,
    pub problems: Vec<Problem>,
}

/// Loads the manifest's instances, keyed by name; failures are kept as text.
pub fn load_instances(manifest: &Manifest) -> BTreeMap<String, Result<QapInstance, String>> {
    manifest
        .instances
        .iter()
        .map(|mi| {
            let loaded = crate::load_instance(&mi.path, manifest.swap_matrices)
                .map_err(|e| format!("{e:#}"));
            (mi.name.clone(), loaded)
        })
        .collect()
}

/// Builds all tables. Groups follow the manifest's instance and algorithm
/// order; replications within a group are ordered by index.
pub fn build_reports(
    records: &[RunRecord],
    manifest: &Manifest,
    instances: &BTreeMap<String, Result<QapInstance, String>>,
) -> Reports {
    let mut out = Reports::default();
    let mut groups: BTreeMap<(&str, Algorithm), Vec<&RunRecord>> = BTreeMap::new();
    for rec in records {
        let known = manifest
            .instances
            .iter()
            .any(|i| i.name == rec.meta.instance)
            && manifest.algorithms.contains(&rec.meta.algorithm);
        if known {
            groups
                .entry((rec.meta.instance.as_str(), rec.meta.algorithm))
                .or_default()
                .push(rec);
        } else {
            out.problems.push(Problem {
                instance: rec.meta.instance.clone(),
                algorithm: Some(rec.meta.algorithm),
                replication: Some(rec.meta.replication),
                error: "trace does not belong to this run".into(),
            });
        }
    }

    for mi in &manifest.instances {
        for &alg in &manifest.algorithms {
            let Some(mut recs) = groups.remove(&(mi.name.as_str(), alg)) else {
                continue;
            };
            recs.sort_by_key(|r| r.meta.replication);
            let problem = |replication: Option<usize>, error: String| Problem {
                instance: mi.name.clone(),
                algorithm: Some(alg),
                replication,
                error,
            };
            let inst = match instances.get(&mi.name) {
                Some(Ok(inst)) => inst,
                Some(Err(e)) => {
                    out.problems
                        .push(problem(None, format!("cannot verify best objective: {e}")));
                    continue;
                }
                None => {
                    out.problems
                        .push(problem(None, "instance not loaded".into()));
                    continue;
                }
            };
            let mut verified = Vec::with_capacity(recs.len());
            for rec in recs {
                match verify(inst, rec) {
                    Ok(()) => verified.push(rec),
                    Err(e) => out.problems.push(problem(Some(rec.meta.replication), e)),
                }
            }
            if verified.is_empty() {
                continue;
            }
            match group_rows(&mi.name, alg, &verified, manifest) {
                Ok((t1, t2, timing)) => {
                    out.table1.push(t1);
                    out.table2.push(t2);
                    out.timing.push(timing);
                }
                Err(e) => out.problems.push(problem(None, format!("{e:#}"))),
            }
        }
    }
    out
}

/// Re-evaluates the stored best assignment and checks it against the trace.
fn verify(inst: &QapInstance, rec: &RunRecord) -> Result<(), String> {
    let m = &rec.meta;
    if m.n != inst.n() {
        return Err(format!(
            "trace has n = {}, instance has n = {}",
            m.n,
            inst.n()
        ));
    }
    let actual = objective(inst, &m.best_assignment).map_err(|e| e.to_string())?;
    if actual != Cost(m.best_cost) {
        return Err(format!(
            "stored best cost {} but the stored assignment evaluates to {}",
            m.best_cost, actual.0
        ));
    }
    let trace_best = rec.trace.iter().map(|t| t.best).min().unwrap_or(i64::MAX);
    if trace_best != m.best_cost {
        return Err(format!(
            "stored best cost {} differs from the trace minimum {trace_best}",
            m.best_cost
        ));
    }
    Ok(())
}

fn group_rows(
    instance: &str,
    algorithm: Algorithm,
    recs: &[&RunRecord],
    manifest: &Manifest,
) -> Result<(ReportRow, Table2Row, TimingRow)> {
    let results: Vec<SolverResult> = recs
        .iter()
        .map(|r| SolverResult {
            best_assignment: r.meta.best_assignment.clone(),
            best_cost: Cost(r.meta.best_cost),
            trace: r.trace.clone(),
            iterations_run: r.trace.len(),
            wall_time: r.meta.wall_time,
            converged: None,
        })
        .collect();
    let stats = aggregate_replications(&results)?;
    let half = manifest.half_count.then(|| HalfColumns {
        best_obj: Cost(stats.best_obj).half(),
        mean_best: stats.mean_best / 2.0,
        mean_avg: stats.mean_avg / 2.0,
        mean_worst: stats.mean_worst / 2.0,
        var_best: stats.var_best / 4.0,
        var_avg: stats.var_avg / 4.0,
        var_worst: stats.var_worst / 4.0,
    });
    let t1 = ReportRow {
        instance: instance.to_string(),
        algorithm,
        replications: stats.replications,
        best_obj: stats.best_obj,
        mean_best: stats.mean_best,
        mean_avg: stats.mean_avg,
        mean_worst: stats.mean_worst,
        var_best: stats.var_best,
        var_avg: stats.var_avg,
        var_worst: stats.var_worst,
        half,
    };

    let conv = results
        .iter()
        .map(|r| ConvergenceReport::from_trace(&r.trace, manifest.detector))
        .collect::<qap_core::Result<Vec<_>>>()
        .context("strong-convergence replay")?;
    let summary = table2_summary(&conv)?;
    let t2 = Table2Row {
        instance: instance.to_string(),
        algorithm,
        replications: summary.replications,
        converged: summary.converged,
        objective: summary.objective,
        iterations: summary.iterations,
        not_converged: summary.not_converged.clone(),
        detector: manifest.detector,
        objective_half: manifest.half_count.then(|| Triple {
            max: summary.objective.max / 2.0,
            mean: summary.objective.mean / 2.0,
            min: summary.objective.min / 2.0,
        }),
    };

    // first iteration of every replication is excluded
    let deltas: Vec<f64> = results
        .iter()
        .flat_map(|r| r.trace.iter().skip(1).map(|t| t.lambda))
        .collect();
    let (lambda, lambda_note) = match lambda_stats_from_deltas(&deltas) {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (robustness, robustness_note) = match robustness_gof(&deltas, default_bins(deltas.len())) {
        Ok(g) => (Some(g), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let timing = TimingRow {
        instance: instance.to_string(),
        algorithm,
        efficiency: stats.efficiency,
        time: stats.total_time,
        lambda,
        lambda_note,
        robustness,
        robustness_note,
        convergence_runtime: summary.runtime,
    };
    Ok((t1, t2, timing))
}

fn fmt_f(x: f64) -> String {
    format!("{x}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

fn triple_fields(t: Option<Triple>) -> [String; 3] {
    [
        fmt_opt(t.map(|t| t.max)),
        fmt_opt(t.map(|t| t.mean)),
        fmt_opt(t.map(|t| t.min)),
    ]
}

fn table1_csv(rows: &[ReportRow], half: bool) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = [
        "instance",
        "algorithm",
        "replications",
        "best_obj",
        "mean_best",
        "mean_avg",
        "mean_worst",
        "var_best",
        "var_avg",
        "var_worst",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let quality = [
        "best_obj",
        "mean_best",
        "mean_avg",
        "mean_worst",
        "var_best",
        "var_avg",
        "var_worst",
    ];
    if half {
        header.extend(quality.iter().map(|q| format!("{q}_half")));
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.instance.clone(),
            r.algorithm.to_string(),
            r.replications.to_string(),
            r.best_obj.to_string(),
            fmt_f(r.mean_best),
            fmt_f(r.mean_avg),
            fmt_f(r.mean_worst),
            fmt_f(r.var_best),
            fmt_f(r.var_avg),
            fmt_f(r.var_worst),
        ];
        if half {
            let h = r.half.context("half columns missing")?;
            rec.extend(
                [
                    h.best_obj,
                    h.mean_best,
                    h.mean_avg,
                    h.mean_worst,
                    h.var_best,
                    h.var_avg,
                    h.var_worst,
                ]
                .map(fmt_f),
            );
        }
        w.write_record(&rec)?;
    }
    Ok(w.into_inner()?)
}

fn table2_csv(rows: &[Table2Row], half: bool) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "instance",
        "algorithm",
        "replications",
        "converged",
        "objective_max",
        "objective_mean",
        "objective_min",
        "iterations_max",
        "iterations_mean",
        "iterations_min",
        "not_converged",
        "window",
        "delta",
        "target",
    ];
    if half {
        header.extend([
            "objective_half_max",
            "objective_half_mean",
            "objective_half_min",
        ]);
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.instance.clone(),
            r.algorithm.to_string(),
            r.replications.to_string(),
            r.converged.to_string(),
        ];
        rec.extend(triple_fields(Some(r.objective)));
        rec.extend(triple_fields(r.iterations));
        rec.push(
            r.not_converged
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(";"),
        );
        rec.push(r.detector.window.to_string());
        rec.push(fmt_f(r.detector.delta));
        rec.push(r.detector.target.to_string());
        if half {
            rec.extend(triple_fields(Some(
                r.objective_half.context("half columns missing")?,
            )));
        }
        w.write_record(&rec)?;
    }
    Ok(w.into_inner()?)
}

fn timing_csv(rows: &[TimingRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "instance",
        "algorithm",
        "efficiency",
        "time",
        "lambda_min",
        "lambda_mean",
        "lambda_max",
        "lambda_mean_literal",
        "robustness_chi2",
        "robustness_p",
        "robustness_bins",
        "convergence_runtime_max",
        "convergence_runtime_mean",
        "convergence_runtime_min",
        "notes",
    ])?;
    for r in rows {
        let mut rec = vec![
            r.instance.clone(),
            r.algorithm.to_string(),
            fmt_opt(r.efficiency),
            fmt_f(r.time),
            fmt_opt(r.lambda.map(|l| l.lambda_min)),
            fmt_opt(r.lambda.map(|l| l.lambda_mean)),
            fmt_opt(r.lambda.map(|l| l.lambda_max)),
            fmt_opt(r.lambda.map(|l| l.lambda_mean_literal)),
            fmt_opt(r.robustness.map(|g| g.statistic)),
            fmt_opt(r.robustness.map(|g| g.p_value)),
            r.robustness.map(|g| g.bins.to_string()).unwrap_or_default(),
        ];
        rec.extend(triple_fields(r.convergence_runtime));
        let notes: Vec<&str> = [r.lambda_note.as_deref(), r.robustness_note.as_deref()]
            .into_iter()
            .flatten()
            .collect();
        rec.push(notes.join("; "));
        w.write_record(&rec)?;
    }
    Ok(w.into_inner()?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_bytes(path: &Path, bytes: Vec<u8>) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Writes `table1`, `table2` and `timing` in the requested formats.
pub fn write_reports(
    dir: &Path,
    reports: &Reports,
    formats: &[ReportFormat],
    half: bool,
) -> Result<()> {
    for format in formats {
        match format {
            ReportFormat::Json => {
                write_json(&dir.join("table1.json"), &reports.table1)?;
                write_json(&dir.join("table2.json"), &reports.table2)?;
                write_json(&dir.join("timing.json"), &reports.timing)?;
            }
            ReportFormat::Csv => {
                write_bytes(&dir.join("table1.csv"), table1_csv(&reports.table1, half)?)?;
                write_bytes(&dir.join("table2.csv"), table2_csv(&reports.table2, half)?)?;
                write_bytes(&dir.join("timing.csv"), timing_csv(&reports.timing)?)?;
            }
        }
    }
    Ok(())
}
