use serde::{Deserialize, Serialize};

use super::{
    lambda_stats, mean, population_variance, ConvergenceDetector, DetectorConfig, IterationTrace,
};
use crate::error::{QapError, Result};
use crate::solvers::SolverResult;

/// Run-level view of one replication: the best objective found, and the
/// mean and worst candidate cost of the final iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunLevel {
    pub best: i64,
    pub average: f64,
    pub worst: i64,
}

pub fn run_level(trace: &[IterationTrace]) -> Result<RunLevel> {
    let last = trace
        .last()
        .ok_or_else(|| QapError::InsufficientData("empty trace".into()))?;
    let best = trace.iter().map(|t| t.best).min().expect("non-empty");
    Ok(RunLevel {
        best,
        average: last.mean,
        worst: last.worst,
    })
}

/// The eight quality measurements over a set of replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStatistics {
    pub best_obj: i64,
    pub mean_best: f64,
    pub mean_avg: f64,
    pub mean_worst: f64,
    pub var_best: f64,
    pub var_avg: f64,
    pub var_worst: f64,
    /// Mean over replications of the per-iteration time; `None` when no
    /// replication ran at least two iterations.
    pub efficiency: Option<f64>,
    pub total_time: f64,
    pub replications: usize,
}

/// Means and population variances across replications.
pub fn aggregate_replications(results: &[SolverResult]) -> Result<RunStatistics> {
    if results.is_empty() {
        return Err(QapError::InsufficientData(
            "no replications to aggregate".into(),
        ));
    }
    let levels = results
        .iter()
        .map(|r| run_level(&r.trace))
        .collect::<Result<Vec<_>>>()?;
    let bests: Vec<f64> = levels.iter().map(|l| l.best as f64).collect();
    let avgs: Vec<f64> = levels.iter().map(|l| l.average).collect();
    let worsts: Vec<f64> = levels.iter().map(|l| l.worst as f64).collect();
    let lambdas: Vec<f64> = results
        .iter()
        .filter_map(|r| lambda_stats(&r.trace).ok())
        .map(|s| s.lambda_mean)
        .collect();
    let times: Vec<f64> = results.iter().map(|r| r.wall_time).collect();
    Ok(RunStatistics {
        best_obj: levels.iter().map(|l| l.best).min().expect("non-empty"),
        mean_best: mean(&bests),
        mean_avg: mean(&avgs),
        mean_worst: mean(&worsts),
        var_best: population_variance(&bests),
        var_avg: population_variance(&avgs),
        var_worst: population_variance(&worsts),
        efficiency: (!lambdas.is_empty()).then(|| mean(&lambdas)),
        total_time: mean(&times),
        replications: results.len(),
    })
}

/// Strong-convergence outcome of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub trigger_iteration: Option<usize>,
    pub k_final: usize,
    pub config: DetectorConfig,
    /// Best-so-far objective at the trigger iteration, or at the end of the
    /// budget when the run did not converge.
    pub objective: i64,
    /// Trigger iteration, or iterations run when not converged.
    pub iterations: usize,
    /// Wall time up to and including the trigger iteration (or the whole run).
    pub runtime: f64,
}

impl ConvergenceReport {
    /// Replays the detector over the per-iteration best costs of a trace.
    pub fn from_trace(trace: &[IterationTrace], config: DetectorConfig) -> Result<Self> {
        if trace.is_empty() {
            return Err(QapError::InsufficientData("empty trace".into()));
        }
        let mut det = ConvergenceDetector::new(config)?;
        for t in trace {
            det.step(t.best as f64)?;
        }
        let stop = det.trigger_iteration().unwrap_or(trace.len());
        let upto = &trace[..stop];
        Ok(Self {
            converged: det.converged(),
            trigger_iteration: det.trigger_iteration(),
            k_final: det.k(),
            config,
            objective: upto.last().expect("non-empty").incumbent,
            iterations: stop,
            runtime: upto.iter().map(|t| t.lambda).sum(),
        })
    }
}

/// Max / mean / min over replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub max: f64,
    pub mean: f64,
    pub min: f64,
}

impl Triple {
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        Some(Self {
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: mean(xs),
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        })
    }
}

/// Strong-convergence summary across replications.
///
/// The objective triple covers every replication. Iteration and runtime
/// triples cover converged replications only and are `None` when none
/// converged; `not_converged` lists the excluded replication indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSummary {
    pub objective: Triple,
    pub iterations: Option<Triple>,
    pub runtime: Option<Triple>,
    pub converged: usize,
    pub replications: usize,
    pub not_converged: Vec<usize>,
}

pub fn table2_summary(reports: &[ConvergenceReport]) -> Result<ConvergenceSummary> {
    let objective: Vec<f64> = reports.iter().map(|r| r.objective as f64).collect();
    let objective = Triple::of(&objective)
        .ok_or_else(|| QapError::InsufficientData("no replications to summarize".into()))?;
    let converged: Vec<&ConvergenceReport> = reports.iter().filter(|r| r.converged).collect();
    let iterations: Vec<f64> = converged.iter().map(|r| r.iterations as f64).collect();
    let runtime: Vec<f64> = converged.iter().map(|r| r.runtime).collect();
    Ok(ConvergenceSummary {
        objective,
        iterations: Triple::of(&iterations),
        runtime: Triple::of(&runtime),
        converged: converged.len(),
        replications: reports.len(),
        not_converged: reports
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.converged)
            .map(|(i, _)| i)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::Assignment;
    use crate::cost::Cost;

    fn result_with(best: i64, avg: f64, worst: i64) -> SolverResult {
        let trace = vec![
            IterationTrace {
                iteration: 1,
                best: best + 5,
                mean: avg + 5.0,
                worst: worst + 5,
                incumbent: best + 5,
                lambda: 0.5,
            },
            IterationTrace {
                iteration: 2,
                best,
                mean: avg,
                worst,
                incumbent: best,
                lambda: 0.25,
            },
        ];
        SolverResult {
            best_assignment: Assignment::identity(2),
            best_cost: Cost(best),
            trace,
            iterations_run: 2,
            wall_time: 0.75,
            converged: None,
        }
    }

    #[test]
    fn single_replication_has_zero_variance() {
        let s = aggregate_replications(&[result_with(10, 12.0, 20)]).unwrap();
        assert_eq!((s.mean_best, s.mean_avg, s.mean_worst), (10.0, 12.0, 20.0));
        assert_eq!((s.var_best, s.var_avg, s.var_worst), (0.0, 0.0, 0.0));
        assert_eq!(s.efficiency, Some(0.25));
        assert_eq!(s.total_time, 0.75);
    }

    #[test]
    fn two_replications() {
        let s = aggregate_replications(&[result_with(10, 11.0, 12), result_with(14, 15.0, 16)])
            .unwrap();
        assert_eq!(s.mean_best, 12.0);
        assert_eq!(s.var_best, 4.0);
        assert_eq!(s.best_obj, 10);
    }

    #[test]
    fn empty_is_error() {
        assert!(aggregate_replications(&[]).is_err());
        assert!(table2_summary(&[]).is_err());
    }

    fn report(
        converged: bool,
        objective: i64,
        iterations: usize,
        runtime: f64,
    ) -> ConvergenceReport {
        ConvergenceReport {
            converged,
            trigger_iteration: converged.then_some(iterations),
            k_final: if converged { 10 } else { 2 },
            config: DetectorConfig::default(),
            objective,
            iterations,
            runtime,
        }
    }

    #[test]
    fn single_report_triples_collapse() {
        let s = table2_summary(&[report(true, 100, 60, 1.5)]).unwrap();
        for t in [s.objective, s.iterations.unwrap(), s.runtime.unwrap()] {
            assert_eq!(t.max, t.mean);
            assert_eq!(t.mean, t.min);
        }
    }

    #[test]
    fn non_converged_excluded_from_iterations() {
        let s = table2_summary(&[report(true, 100, 60, 1.0), report(false, 90, 500, 9.0)]).unwrap();
        assert_eq!(s.objective.min, 90.0);
        assert_eq!(s.iterations.unwrap().max, 60.0);
        assert_eq!(s.runtime.unwrap().max, 1.0);
        assert_eq!(s.not_converged, vec![1]);
        assert_eq!(s.converged, 1);
    }

    #[test]
    fn replay_from_trace() {
        let trace: Vec<IterationTrace> = (1..=12)
            .map(|i| IterationTrace {
                iteration: i,
                best: 7,
                mean: 8.0,
                worst: 9,
                incumbent: 7,
                lambda: 0.5,
            })
            .collect();
        let cfg = DetectorConfig {
            window: 5,
            delta: 0.01,
            target: 3,
        };
        let r = ConvergenceReport::from_trace(&trace, cfg).unwrap();
        assert!(r.converged);
        assert_eq!(r.trigger_iteration, Some(8));
        assert_eq!(r.iterations, 8);
        assert_eq!(r.runtime, 4.0);
        assert_eq!(r.k_final, 7);
    }
}
