//! Local search heuristic: pairwise-exchange descent with an
//! inversion-mutation restart.
//!
//! A descent sweeps the pairs `(i, j > i)`, applying every improving exchange
//! as soon as it is found, and sweeps again until a full pass finds nothing;
//! its result is a swap-local optimum. One iteration is one descent. The
//! first iteration descends from a random start. Every later iteration
//! perturbs the incumbent with an inversion mutation and descends from the
//! mutant; the outcome replaces the incumbent only when strictly better,
//! otherwise the next iteration restarts from the incumbent.

use std::time::Instant;

use crate::assignment::Assignment;
use crate::cost::swap_delta_unchecked;
use crate::error::Result;
use crate::instance::QapInstance;
use crate::metrics::CandidateStats;
use crate::perm_ops::inversion_mutation;

use super::{eval, Observer, Recorder, SolverConfig, SolverResult, SolverRng};

/// Sweeps until no exchange improves; returns the final cost. Every
/// evaluated neighbor cost is appended to `costs`.
fn descend(inst: &QapInstance, current: &mut Assignment, mut z: i64, costs: &mut Vec<i64>) -> i64 {
    let n = inst.n();
    loop {
        let mut improved = false;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let d = swap_delta_unchecked(inst, current.as_slice(), i, j);
                costs.push(z + d);
                if d < 0 {
                    current.swap(i, j);
                    z += d;
                    improved = true;
                }
            }
        }
        if !improved {
            return z;
        }
    }
}

pub fn run_lsh(
    inst: &QapInstance,
    cfg: &SolverConfig,
    rng: &mut SolverRng,
    observer: &mut dyn Observer,
) -> Result<SolverResult> {
    cfg.validate()?;
    let mut rec = Recorder::new(cfg, observer)?;
    let n = inst.n();

    let mut best = Assignment::random(n, rng);
    let mut best_cost = eval(inst, &best);
    let mut costs = Vec::new();

    for t in 0..cfg.max_iterations {
        let started = Instant::now();
        costs.clear();

        let (mut current, mut z) = if t == 0 {
            (best.clone(), best_cost)
        } else {
            let mutant = inversion_mutation(&best, rng);
            let mz = eval(inst, &mutant);
            (mutant, mz)
        };
        costs.push(z);
        z = descend(inst, &mut current, z, &mut costs);
        if z < best_cost || t == 0 {
            best = current;
            best_cost = z;
        }

        let stats = CandidateStats::from_costs(costs.iter().copied()).expect("non-empty");
        rec.record(started, stats, best_cost)?;
    }
    Ok(rec.finish(best, best_cost))
}
