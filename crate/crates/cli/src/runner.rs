//! Replicated experiment execution.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use qap_core::solvers::{rng_from_seed, NoopObserver};
use qap_core::{objective, Algorithm, QapInstance, SolverConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Violations};
use crate::report::{
    build_reports, write_json, write_reports, Manifest, ManifestInstance, Problem,
};
use crate::trace_file::{RunRecord, TraceMeta, EXTENSION};

pub const TRACE_DIR: &str = "traces";
pub const FAILURES_FILE: &str = "failures.json";
pub const METADATA_FILE: &str = "metadata.json";

struct Cell {
    instance: usize,
    replication: usize,
    config: SolverConfig,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub cells: usize,
    /// Failed cells and report-level problems, in cell order.
    pub failures: Vec<Problem>,
}

#[derive(Serialize)]
struct Metadata {
    started_unix: f64,
    finished_unix: f64,
    workers: usize,
    cells: usize,
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Runs every (instance, algorithm, replication) cell and writes traces,
/// reports, the manifest and the failure list under `cfg.output_dir`.
///
/// Configuration and input errors abort before any cell runs. A failing
/// cell is recorded and the remaining cells still run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let started_unix = unix_now();
    cfg.validate()?;

    let mut errs = Vec::new();
    let mut instances = Vec::new();
    for path in &cfg.instances {
        match crate::load_instance(path, cfg.swap_matrices) {
            Ok(inst) => instances.push((path.clone(), inst)),
            Err(e) => errs.push(format!("{e:#}")),
        }
    }
    if !errs.is_empty() {
        return Err(Violations(errs).into());
    }

    let algorithms: Vec<Algorithm> = cfg
        .algorithms
        .iter()
        .map(|a| a.algorithm())
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    for (ii, (_, inst)) in instances.iter().enumerate() {
        for entry in &cfg.algorithms {
            for r in 0..cfg.replications {
                match entry.solver_config(inst.n(), cfg.replication_seed(r)) {
                    Ok(config) => cells.push(Cell {
                        instance: ii,
                        replication: r,
                        config,
                    }),
                    Err(e) => errs.push(format!("{}: {e:#}", inst.name())),
                }
            }
        }
    }
    if !errs.is_empty() {
        errs.dedup();
        return Err(Violations(errs).into());
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .context("starting worker pool")?;
    log::info!("running {} cells on {} worker(s)", cells.len(), cfg.workers);
    let outcomes: Vec<Result<RunRecord, Problem>> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| run_cell(&instances[cell.instance].1, cell))
            .collect()
    });

    let out = &cfg.output_dir;
    let trace_dir = out.join(TRACE_DIR);
    std::fs::create_dir_all(&trace_dir)
        .with_context(|| format!("creating {}", trace_dir.display()))?;
    remove_stale_traces(&trace_dir)?;

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(rec) => {
                let path = trace_dir.join(rec.file_name());
                std::fs::write(&path, rec.to_text())
                    .with_context(|| format!("writing {}", path.display()))?;
                records.push(rec);
            }
            Err(p) => {
                log::error!(
                    "{} / {} / replication {}: {}",
                    p.instance,
                    p.algorithm.map(|a| a.to_string()).unwrap_or_default(),
                    p.replication.unwrap_or_default(),
                    p.error
                );
                failures.push(p);
            }
        }
    }

    let manifest = Manifest {
        seed: cfg.seed,
        replications: cfg.replications,
        detector: cfg.detector,
        half_count: cfg.half_count,
        swap_matrices: cfg.swap_matrices,
        formats: cfg.formats.clone(),
        instances: instances
            .iter()
            .map(|(path, inst)| ManifestInstance {
                name: inst.name().to_string(),
                path: std::path::absolute(path).unwrap_or_else(|_| path.clone()),
            })
            .collect(),
        algorithms,
    };
    manifest.write(out)?;

    let loaded: BTreeMap<String, Result<QapInstance, String>> = instances
        .into_iter()
        .map(|(_, inst)| (inst.name().to_string(), Ok(inst)))
        .collect();
    let reports = build_reports(&records, &manifest, &loaded);
    write_reports(out, &reports, &cfg.formats, cfg.half_count)?;
    failures.extend(reports.problems);
    write_json(&out.join(FAILURES_FILE), &failures)?;
    write_json(
        &out.join(METADATA_FILE),
        &Metadata {
            started_unix,
            finished_unix: unix_now(),
            workers: cfg.workers,
            cells: cells.len(),
        },
    )?;

    Ok(RunSummary {
        out_dir: out.clone(),
        cells: cells.len(),
        failures,
    })
}

fn run_cell(inst: &QapInstance, cell: &Cell) -> Result<RunRecord, Problem> {
    let cfg = &cell.config;
    let problem = |error: String| Problem {
        instance: inst.name().to_string(),
        algorithm: Some(cfg.algorithm),
        replication: Some(cell.replication),
        error,
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        qap_core::run(inst, cfg, &mut rng_from_seed(cfg.seed), &mut NoopObserver)
    }));
    let res = match outcome {
        Ok(Ok(res)) => res,
        Ok(Err(e)) => return Err(problem(e.to_string())),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "solver panicked".into());
            return Err(problem(format!("panic: {msg}")));
        }
    };
    match objective(inst, &res.best_assignment) {
        Ok(c) if c == res.best_cost => {}
        Ok(c) => {
            return Err(problem(format!(
                "reported best cost {} but the assignment evaluates to {}",
                res.best_cost.0, c.0
            )))
        }
        Err(e) => return Err(problem(e.to_string())),
    }
    Ok(RunRecord {
        meta: TraceMeta {
            instance: inst.name().to_string(),
            algorithm: cfg.algorithm,
            replication: cell.replication,
            seed: cfg.seed,
            n: inst.n(),
            best_cost: res.best_cost.0,
            best_assignment: res.best_assignment,
            wall_time: res.wall_time,
        },
        trace: res.trace,
    })
}

fn remove_stale_traces(dir: &Path) -> Result<()> {
    for entry in std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == EXTENSION) {
            std::fs::remove_file(&path).with_context(|| format!("removing {}", path.display()))?;
        }
    }
    Ok(())
}

/// Trace files of a run directory, sorted by file name.
pub fn trace_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let trace_dir = dir.join(TRACE_DIR);
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&trace_dir)
        .with_context(|| format!("listing {}", trace_dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == EXTENSION));
    paths.sort();
    Ok(paths)
}

#[derive(Debug, Clone)]
pub struct ReportSummary {
    pub groups: usize,
    pub problems: Vec<String>,
}

/// Rebuilds the reports of a run directory from its manifest and traces.
/// Corrupt traces are skipped and listed in the returned problems.
pub fn regenerate_reports(dir: &Path, out: &Path) -> Result<ReportSummary> {
    let manifest = Manifest::read(dir)?;
    let mut records = Vec::new();
    let mut problems = Vec::new();
    for path in trace_paths(dir)? {
        match RunRecord::read(&path) {
            Ok(rec) => records.push(rec),
            Err(e) => problems.push(format!("{e:#}")),
        }
    }
    let instances = crate::report::load_instances(&manifest);
    let reports = build_reports(&records, &manifest, &instances);
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_reports(out, &reports, &manifest.formats, manifest.half_count)?;
    problems.extend(reports.problems.iter().map(|p| {
        format!(
            "{} {} {}: {}",
            p.instance,
            p.algorithm.map(|a| a.to_string()).unwrap_or_default(),
            p.replication.map(|r| format!("r{r}")).unwrap_or_default(),
            p.error
        )
    }));
    Ok(ReportSummary {
        groups: reports.table1.len(),
        problems,
    })
}
