//! Generational GA: roulette-wheel parents, MOX crossover, a weighted mix of
//! insertion / inversion / exchange mutation, and an elite of one.

use std::time::Instant;

use rand::Rng;

use crate::assignment::Assignment;
use crate::cost::Cost;
use crate::error::Result;
use crate::instance::QapInstance;
use crate::metrics::CandidateStats;
use crate::perm_ops::{mox_crossover, roulette_select, Mutation, Population};

use super::{eval, GaParams, Observer, Recorder, SolverConfig, SolverResult, SolverRng};

fn pick_mutation(params: &GaParams, rng: &mut SolverRng) -> Mutation {
    let total: f64 = params.mutation_mix.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (op, w) in Mutation::ALL.into_iter().zip(params.mutation_mix) {
        if u < w {
            return op;
        }
        u -= w;
    }
    // rounding fallback: last operator with positive weight
    Mutation::ALL
        .into_iter()
        .zip(params.mutation_mix)
        .rev()
        .find(|(_, w)| *w > 0.0)
        .map(|(op, _)| op)
        .expect("validated mix has a positive weight")
}

fn argmin(costs: &[Cost]) -> usize {
    costs
        .iter()
        .enumerate()
        .min_by_key(|(i, c)| (**c, *i))
        .map(|(i, _)| i)
        .expect("non-empty population")
}

pub fn run_ga(
    inst: &QapInstance,
    cfg: &SolverConfig,
    rng: &mut SolverRng,
    observer: &mut dyn Observer,
) -> Result<SolverResult> {
    cfg.validate()?;
    let mut rec = Recorder::new(cfg, observer)?;
    let n = inst.n();
    let size = cfg.population_size;
    let params = cfg.ga;

    let members: Vec<Assignment> = (0..size).map(|_| Assignment::random(n, rng)).collect();
    let costs = members.iter().map(|m| Cost(eval(inst, m))).collect();
    let mut pop = Population::new(members, costs)?;

    for _ in 0..cfg.max_iterations {
        let started = Instant::now();
        let elite = argmin(&pop.costs);
        let mut next = vec![pop.members[elite].clone()];
        let mut next_costs = vec![pop.costs[elite]];

        while next.len() < size {
            let a = roulette_select(&pop, rng);
            let b = roulette_select(&pop, rng);
            let (c1, c2) = if rng.random::<f64>() < params.crossover_rate {
                mox_crossover(&pop.members[a], &pop.members[b], rng)?
            } else {
                (pop.members[a].clone(), pop.members[b].clone())
            };
            for child in [c1, c2] {
                if next.len() == size {
                    break;
                }
                let child = if rng.random::<f64>() < params.mutation_rate {
                    pick_mutation(&params, rng).apply(&child, rng)
                } else {
                    child
                };
                next_costs.push(Cost(eval(inst, &child)));
                next.push(child);
            }
        }
        pop = Population::new(next, next_costs)?;

        let stats = CandidateStats::from_costs(pop.costs.iter().map(|c| c.0)).expect("non-empty");
        rec.record(started, stats, stats.best)?;
    }
    let elite = argmin(&pop.costs);
    let best_cost = pop.costs[elite].0;
    Ok(rec.finish(pop.members.swap_remove(elite), best_cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::brute_force;
    use crate::solvers::test_support::{check_result, random_instance};
    use crate::solvers::{rng_from_seed, Algorithm, NoopObserver};

    #[test]
    fn no_variation_keeps_trace_constant() {
        let inst = random_instance(6, 1);
        let mut cfg = SolverConfig::defaults_for(Algorithm::Ga, 6)
            .with_population(1)
            .with_iterations(30);
        cfg.ga.crossover_rate = 0.0;
        cfg.ga.mutation_rate = 0.0;
        let res = run_ga(&inst, &cfg, &mut rng_from_seed(2), &mut NoopObserver).unwrap();
        let first = res.trace[0];
        assert!(res
            .trace
            .iter()
            .all(|t| t.best == first.best && t.worst == first.worst));
    }

    #[test]
    fn elitism_keeps_best_monotone() {
        let inst = random_instance(8, 5);
        let cfg = SolverConfig::defaults_for(Algorithm::Ga, 8).with_iterations(100);
        let res = run_ga(&inst, &cfg, &mut rng_from_seed(8), &mut NoopObserver).unwrap();
        check_result(&inst, &res);
        assert!(res.trace.windows(2).all(|w| w[1].best <= w[0].best));
    }

    #[test]
    fn median_within_five_percent_of_optimum() {
        let inst = random_instance(6, 77);
        let (_, opt) = brute_force(&inst).unwrap();
        let cfg = SolverConfig::defaults_for(Algorithm::Ga, 6).with_iterations(200);
        let mut finals: Vec<i64> = (0..30).map(|seed| solve_seed(&inst, &cfg, seed)).collect();
        finals.sort_unstable();
        assert!(finals[0] >= opt.0);
        assert!(finals[15] as f64 <= 1.05 * opt.0 as f64);
    }

    fn solve_seed(inst: &QapInstance, cfg: &SolverConfig, seed: u64) -> i64 {
        run_ga(inst, cfg, &mut rng_from_seed(seed), &mut NoopObserver)
            .unwrap()
            .best_cost
            .0
    }

    #[test]
    fn mutation_mix_respects_zero_weights() {
        let mut rng = rng_from_seed(0);
        let params = GaParams {
            crossover_rate: 0.0,
            mutation_rate: 1.0,
            mutation_mix: [0.0, 0.0, 2.0],
        };
        for _ in 0..200 {
            assert_eq!(pick_mutation(&params, &mut rng), Mutation::Exchange);
        }
    }
}
