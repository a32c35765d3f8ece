//! Random-key particle swarm and its GA hybrid.
//!
//! Positions live in key space and are decoded by argsort for evaluation.
//! The acceleration coefficients fall linearly from their start to their end
//! values over the iteration budget. The hybrid additionally mutates each
//! personal best and the global best as permutations and keeps a mutant only
//! when it is strictly better, re-encoding it by rearranging the stored keys.
//! Hybrid mutations draw from a separate stream so that the swarm dynamics
//! consume the main stream exactly as plain PSO does.

use std::time::Instant;

use rand::Rng;

use crate::error::Result;
use crate::instance::QapInstance;
use crate::metrics::CandidateStats;
use crate::perm_ops::{decode_finite, encode_like, KeyVector, Mutation};

use super::{eval, Observer, PsoParams, Recorder, SolverConfig, SolverResult, SolverRng};

/// Value at iteration `t` (0-based) of a linear schedule over `total` iterations.
pub fn interpolate(start: f64, end: f64, t: usize, total: usize) -> f64 {
    if total <= 1 {
        return start;
    }
    start + (end - start) * t as f64 / (total - 1) as f64
}

/// `v <- w v + c1 r1 (p - x) + c2 r2 (g - x)`, then `x <- x + v`, componentwise.
#[allow(clippy::too_many_arguments)]
pub fn velocity_update(
    x: &mut [f64],
    v: &mut [f64],
    personal: &[f64],
    global: &[f64],
    inertia: f64,
    c1: f64,
    c2: f64,
    r1: &[f64],
    r2: &[f64],
) {
    for d in 0..x.len() {
        v[d] = inertia * v[d] + c1 * r1[d] * (personal[d] - x[d]) + c2 * r2[d] * (global[d] - x[d]);
        x[d] += v[d];
    }
}

pub(crate) struct Swarm {
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    pub personal: Vec<Vec<f64>>,
    pub personal_cost: Vec<i64>,
    pub global: Vec<f64>,
    pub global_cost: i64,
}

fn try_mutation(
    inst: &QapInstance,
    keys: &mut Vec<f64>,
    cost: &mut i64,
    rng: &mut SolverRng,
) -> Option<i64> {
    let perm = decode_finite(keys);
    let op = Mutation::ALL[rng.random_range(0..Mutation::ALL.len())];
    let mutant = op.apply(&perm, rng);
    let mc = eval(inst, &mutant);
    if mc < *cost {
        *keys = encode_like(&KeyVector(std::mem::take(keys)), &mutant).0;
        *cost = mc;
        Some(mc)
    } else {
        None
    }
}

pub(crate) fn run_swarm(
    inst: &QapInstance,
    cfg: &SolverConfig,
    rng: &mut SolverRng,
    observer: &mut dyn Observer,
    hybrid: bool,
) -> Result<(SolverResult, Swarm)> {
    cfg.validate()?;
    let mut rec = Recorder::new(cfg, observer)?;
    let n = inst.n();
    let size = cfg.population_size;
    let PsoParams {
        inertia,
        c1_start,
        c1_end,
        c2_start,
        c2_end,
    } = cfg.pso;

    let mut mutation_rng = rng.clone();
    mutation_rng.set_stream(rng.get_stream().wrapping_add(1));

    let positions: Vec<Vec<f64>> = (0..size).map(|_| KeyVector::random(n, rng).0).collect();
    let mut swarm = Swarm {
        velocities: vec![vec![0.0; n]; size],
        personal: positions.clone(),
        personal_cost: vec![i64::MAX; size],
        positions,
        global: vec![0.0; n],
        global_cost: i64::MAX,
    };
    let mut r1 = vec![0.0; n];
    let mut r2 = vec![0.0; n];
    let mut costs = Vec::with_capacity(size);

    for t in 0..cfg.max_iterations {
        let started = Instant::now();
        let c1 = interpolate(c1_start, c1_end, t, cfg.max_iterations);
        let c2 = interpolate(c2_start, c2_end, t, cfg.max_iterations);
        costs.clear();
        let mut improved_best = i64::MAX;

        for i in 0..size {
            let fx = eval(inst, &decode_finite(&swarm.positions[i]));
            costs.push(fx);
            if fx < swarm.personal_cost[i] {
                swarm.personal[i].clone_from(&swarm.positions[i]);
                swarm.personal_cost[i] = fx;
            }
            if hybrid {
                if let Some(c) = try_mutation(
                    inst,
                    &mut swarm.personal[i],
                    &mut swarm.personal_cost[i],
                    &mut mutation_rng,
                ) {
                    improved_best = improved_best.min(c);
                }
            }
            if swarm.personal_cost[i] < swarm.global_cost {
                swarm.global.clone_from(&swarm.personal[i]);
                swarm.global_cost = swarm.personal_cost[i];
            }
            if hybrid {
                if let Some(c) = try_mutation(
                    inst,
                    &mut swarm.global,
                    &mut swarm.global_cost,
                    &mut mutation_rng,
                ) {
                    improved_best = improved_best.min(c);
                }
            }
            r1.iter_mut().for_each(|r| *r = rng.random());
            r2.iter_mut().for_each(|r| *r = rng.random());
            let Swarm {
                positions,
                velocities,
                personal,
                global,
                ..
            } = &mut swarm;
            velocity_update(
                &mut positions[i],
                &mut velocities[i],
                &personal[i],
                global,
                inertia,
                c1,
                c2,
                &r1,
                &r2,
            );
        }

        let mut stats = CandidateStats::from_costs(costs.iter().copied()).expect("non-empty");
        stats.best = stats.best.min(improved_best);
        rec.record(started, stats, swarm.global_cost)?;
    }
    let best = decode_finite(&swarm.global);
    let best_cost = swarm.global_cost;
    Ok((rec.finish(best, best_cost), swarm))
}

pub fn run_pso(
    inst: &QapInstance,
    cfg: &SolverConfig,
    rng: &mut SolverRng,
    observer: &mut dyn Observer,
) -> Result<SolverResult> {
    run_swarm(inst, cfg, rng, observer, false).map(|(r, _)| r)
}

pub fn run_ga_pso(
    inst: &QapInstance,
    cfg: &SolverConfig,
    rng: &mut SolverRng,
    observer: &mut dyn Observer,
) -> Result<SolverResult> {
    run_swarm(inst, cfg, rng, observer, true).map(|(r, _)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Matrix, QapInstance};
    use crate::solvers::test_support::{check_result, random_instance};
    use crate::solvers::{rng_from_seed, Algorithm, NoopObserver};

    #[test]
    fn fixed_point_of_update() {
        let mut x = vec![0.3, 0.7, 0.1];
        let mut v = vec![0.0; 3];
        let p = x.clone();
        let g = x.clone();
        for _ in 0..10 {
            velocity_update(&mut x, &mut v, &p, &g, 0.7, 2.0, 2.0, &[0.9; 3], &[0.4; 3]);
        }
        assert_eq!(x, p);
        assert_eq!(v, vec![0.0; 3]);
    }

    #[test]
    fn single_particle_never_moves() {
        let inst = random_instance(6, 3);
        let cfg = SolverConfig::defaults_for(Algorithm::Pso, 6)
            .with_population(1)
            .with_iterations(20);
        let (res, swarm) =
            run_swarm(&inst, &cfg, &mut rng_from_seed(1), &mut NoopObserver, false).unwrap();
        assert!(res.trace.iter().all(|t| t.best == res.trace[0].best));
        assert_eq!(swarm.positions[0], swarm.global);
    }

    #[test]
    fn coefficient_schedule() {
        assert_eq!(interpolate(2.0, 0.5, 0, 4), 2.0);
        assert_eq!(interpolate(2.0, 0.5, 1, 4), 1.5);
        assert_eq!(interpolate(2.0, 0.5, 2, 4), 1.0);
        assert_eq!(interpolate(2.0, 0.5, 3, 4), 0.5);
        assert_eq!(interpolate(2.0, 0.5, 0, 1), 2.0);
    }

    #[test]
    fn global_best_is_monotone() {
        let inst = random_instance(9, 4);
        for hybrid in [false, true] {
            let cfg = SolverConfig::defaults_for(Algorithm::Pso, 9).with_iterations(80);
            let (res, _) = run_swarm(
                &inst,
                &cfg,
                &mut rng_from_seed(6),
                &mut NoopObserver,
                hybrid,
            )
            .unwrap();
            check_result(&inst, &res);
        }
    }

    #[test]
    fn hybrid_without_accepted_mutations_matches_pso() {
        // zero flow: every permutation costs 0, so no mutant is ever strictly better
        let d = random_instance(7, 8).distance().clone();
        let inst = QapInstance::new(Matrix::zeros(7), d).unwrap();
        let cfg = SolverConfig::defaults_for(Algorithm::Pso, 7).with_iterations(40);
        let (a, sa) = run_swarm(
            &inst,
            &cfg,
            &mut rng_from_seed(21),
            &mut NoopObserver,
            false,
        )
        .unwrap();
        let (b, sb) =
            run_swarm(&inst, &cfg, &mut rng_from_seed(21), &mut NoopObserver, true).unwrap();
        assert_eq!(a.without_timing(), b.without_timing());
        assert_eq!(sa.positions, sb.positions);
        assert_eq!(sa.velocities, sb.velocities);
        assert_eq!(sa.personal, sb.personal);
    }
}
