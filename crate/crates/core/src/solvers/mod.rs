//! The seven solvers behind one run contract.
//!
//! Every solver emits exactly one [`IterationTrace`] per iteration through the
//! observer and returns the full trace in its [`SolverResult`]. Runs are
//! single-threaded and fully determined by instance, configuration and seed;
//! only the timing fields vary between executions.

mod config;
mod ga;
mod gwo;
mod hs;
mod lsh;
mod sa;
mod swarm;

pub use config::{
    Algorithm, GaParams, GwoParams, HsParams, PsoParams, SaParams, SolverConfig, DEFAULTS_TOML,
};
pub use ga::run_ga;
pub use gwo::{encircle, run_gwo, GwoState};
pub use hs::run_hs;
pub use lsh::run_lsh;
pub use sa::{metropolis, run_sa};
pub use swarm::{interpolate, run_ga_pso, run_pso, velocity_update};

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::cost::{objective_unchecked, Cost};
use crate::error::Result;
use crate::instance::QapInstance;
use crate::metrics::{CandidateStats, ConvergenceDetector, IterationTrace};

/// Random stream type used by every solver.
pub type SolverRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SolverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Receives one record per iteration, after the iteration's timing is taken.
pub trait Observer {
    fn on_iteration(&mut self, record: &IterationTrace);
}

impl<F: FnMut(&IterationTrace)> Observer for F {
    fn on_iteration(&mut self, record: &IterationTrace) {
        self(record)
    }
}

/// Observer that ignores everything.
pub struct NoopObserver;

impl Observer for NoopObserver {
    fn on_iteration(&mut self, _: &IterationTrace) {}
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub best_assignment: Assignment,
    pub best_cost: Cost,
    pub trace: Vec<IterationTrace>,
    pub iterations_run: usize,
    /// Seconds from the start of the run to its end.
    pub wall_time: f64,
    /// Strong-convergence verdict when a detector was configured.
    pub converged: Option<bool>,
}

impl SolverResult {
    /// Copy with all timing fields zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        out.wall_time = 0.0;
        out.trace.iter_mut().for_each(|t| t.lambda = 0.0);
        out
    }
}

/// Runs the configured algorithm.
pub fn run(
    inst: &QapInstance,
    cfg: &SolverConfig,
    rng: &mut SolverRng,
    observer: &mut dyn Observer,
) -> Result<SolverResult> {
    cfg.validate()?;
    match cfg.algorithm {
        Algorithm::Lsh => run_lsh(inst, cfg, rng, observer),
        Algorithm::Ga => run_ga(inst, cfg, rng, observer),
        Algorithm::Pso => run_pso(inst, cfg, rng, observer),
        Algorithm::GaPso => run_ga_pso(inst, cfg, rng, observer),
        Algorithm::Gwo => run_gwo(inst, cfg, rng, observer),
        Algorithm::Hs => run_hs(inst, cfg, rng, observer),
        Algorithm::Sa => run_sa(inst, cfg, rng, observer),
    }
}

/// Runs with a stream seeded from `cfg.seed` and no observer.
pub fn solve(inst: &QapInstance, cfg: &SolverConfig) -> Result<SolverResult> {
    let mut rng = rng_from_seed(cfg.seed);
    run(inst, cfg, &mut rng, &mut NoopObserver)
}

#[inline]
pub(crate) fn eval(inst: &QapInstance, a: &Assignment) -> i64 {
    objective_unchecked(inst, a.as_slice())
}

/// Shared bookkeeping: trace, observer, detector and timing.
pub(crate) struct Recorder<'a> {
    observer: &'a mut dyn Observer,
    detector: Option<ConvergenceDetector>,
    trace: Vec<IterationTrace>,
    started: Instant,
}

impl<'a> Recorder<'a> {
    pub(crate) fn new(cfg: &SolverConfig, observer: &'a mut dyn Observer) -> Result<Self> {
        let detector = cfg.detector.map(ConvergenceDetector::new).transpose()?;
        Ok(Self {
            observer,
            detector,
            trace: Vec::with_capacity(cfg.max_iterations),
            started: Instant::now(),
        })
    }

    /// Records one iteration whose body started at `iter_start`.
    pub(crate) fn record(
        &mut self,
        iter_start: Instant,
        stats: CandidateStats,
        incumbent: i64,
    ) -> Result<()> {
        let lambda = iter_start.elapsed().as_secs_f64();
        let rec = IterationTrace {
            iteration: self.trace.len() + 1,
            best: stats.best,
            mean: stats.mean,
            worst: stats.worst,
            incumbent,
            lambda,
        };
        if let Some(det) = self.detector.as_mut() {
            det.step(stats.best as f64)?;
        }
        self.observer.on_iteration(&rec);
        self.trace.push(rec);
        Ok(())
    }

    pub(crate) fn finish(self, best_assignment: Assignment, best_cost: i64) -> SolverResult {
        SolverResult {
            best_assignment,
            best_cost: Cost(best_cost),
            iterations_run: self.trace.len(),
            trace: self.trace,
            wall_time: self.started.elapsed().as_secs_f64(),
            converged: self.detector.map(|d| d.converged()),
        }
    }
}
