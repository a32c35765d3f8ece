//! Simulated annealing over the pairwise-exchange neighborhood.
//!
//! The start temperature is calibrated from 100 random exchanges so that the
//! mean uphill move is accepted with probability `t0_acceptance_ratio`.
//! Cooling is geometric and one iteration is one plateau of
//! `moves_per_temperature` proposals.

use std::time::Instant;

use rand::Rng;

use crate::assignment::Assignment;
use crate::cost::swap_delta_unchecked;
use crate::error::Result;
use crate::instance::QapInstance;
use crate::metrics::CandidateStats;

use super::{eval, Observer, Recorder, SolverConfig, SolverResult, SolverRng};

const CALIBRATION_SAMPLES: usize = 100;

/// Metropolis acceptance probability of a move with cost change `delta`.
pub fn metropolis(delta: i64, temperature: f64) -> f64 {
    if delta <= 0 {
        1.0
    } else if temperature <= 0.0 {
        0.0
    } else {
        (-(delta as f64) / temperature).exp()
    }
}

fn random_pair(n: usize, rng: &mut SolverRng) -> (usize, usize) {
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

fn calibrate(inst: &QapInstance, a: &Assignment, ratio: f64, rng: &mut SolverRng) -> f64 {
    let n = inst.n();
    let uphill: Vec<f64> = (0..CALIBRATION_SAMPLES)
        .map(|_| {
            let (i, j) = random_pair(n, rng);
            swap_delta_unchecked(inst, a.as_slice(), i, j)
        })
        .filter(|&d| d > 0)
        .map(|d| d as f64)
        .collect();
    if uphill.is_empty() {
        return 1.0;
    }
    let mean = uphill.iter().sum::<f64>() / uphill.len() as f64;
    -mean / ratio.ln()
}

pub fn run_sa(
    inst: &QapInstance,
    cfg: &SolverConfig,
    rng: &mut SolverRng,
    observer: &mut dyn Observer,
) -> Result<SolverResult> {
    cfg.validate()?;
    let mut rec = Recorder::new(cfg, observer)?;
    let n = inst.n();
    let params = cfg.sa;

    let mut current = Assignment::random(n, rng);
    let mut z = eval(inst, &current);
    let mut best = current.clone();
    let mut best_cost = z;
    let mut temperature = match params.initial_temperature {
        Some(t) => t,
        None => calibrate(inst, &current, params.t0_acceptance_ratio, rng),
    };

    let mut visited = Vec::with_capacity(params.moves_per_temperature);
    for _ in 0..cfg.max_iterations {
        let started = Instant::now();
        visited.clear();
        for _ in 0..params.moves_per_temperature {
            let (i, j) = random_pair(n, rng);
            let d = swap_delta_unchecked(inst, current.as_slice(), i, j);
            let accept = d <= 0 || rng.random::<f64>() < metropolis(d, temperature);
            if accept {
                current.swap(i, j);
                z += d;
                if z < best_cost {
                    best_cost = z;
                    best.clone_from(&current);
                }
            }
            visited.push(z);
        }
        temperature *= params.cooling_alpha;
        let stats = CandidateStats::from_costs(visited.iter().copied()).expect("non-empty");
        rec.record(started, stats, best_cost)?;
    }
    Ok(rec.finish(best, best_cost))
}
