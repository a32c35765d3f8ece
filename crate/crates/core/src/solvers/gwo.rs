//! Random-key grey wolf optimizer.
//!
//! Each wolf moves to the mean of three encircling targets, one per leader
//! (alpha, beta, delta). Fresh `r1`, `r2` vectors are drawn for every leader
//! separately. The leaders are the three best positions seen so far and are
//! re-ranked after every sweep of the pack.

use std::time::Instant;

use rand::Rng;

use crate::error::Result;
use crate::instance::QapInstance;
use crate::metrics::CandidateStats;
use crate::perm_ops::{decode_finite, KeyVector};

use super::swarm::interpolate;
use super::{eval, Observer, Recorder, SolverConfig, SolverResult, SolverRng};

/// Leaders and pack of a GWO run.
#[derive(Debug, Clone, PartialEq)]
pub struct GwoState {
    /// Alpha, beta and delta positions with their costs, best first.
    pub leaders: [(Vec<f64>, i64); 3],
    pub pack: Vec<Vec<f64>>,
    pub pack_costs: Vec<i64>,
    pub a: f64,
}

impl GwoState {
    fn rerank(&mut self) {
        let mut pool: Vec<(Vec<f64>, i64)> = self.leaders.to_vec();
        pool.extend(
            self.pack
                .iter()
                .cloned()
                .zip(self.pack_costs.iter().copied()),
        );
        // stable: on ties existing leaders keep their rank
        pool.sort_by_key(|(_, c)| *c);
        pool.truncate(3);
        let mut it = pool.into_iter();
        self.leaders = [
            it.next().expect("three leaders"),
            it.next().expect("three leaders"),
            it.next().expect("three leaders"),
        ];
    }
}

/// Encircling target around `leader`:
/// `A = 2a r1 - a`, `C = 2 r2`, `D = |C leader - wolf|`, result `leader - A D`.
pub fn encircle(leader: &[f64], wolf: &[f64], a: f64, r1: &[f64], r2: &[f64]) -> Vec<f64> {
    leader
        .iter()
        .zip(wolf)
        .zip(r1.iter().zip(r2))
        .map(|((&xl, &x), (&u1, &u2))| {
            let big_a = 2.0 * a * u1 - a;
            let big_c = 2.0 * u2;
            let dist = (big_c * xl - x).abs();
            xl - big_a * dist
        })
        .collect()
}

pub(crate) fn gwo_with_state(
    inst: &QapInstance,
    cfg: &SolverConfig,
    rng: &mut SolverRng,
    observer: &mut dyn Observer,
    mut inspect: impl FnMut(&GwoState),
) -> Result<SolverResult> {
    cfg.validate()?;
    let mut rec = Recorder::new(cfg, observer)?;
    let n = inst.n();
    let size = cfg.population_size;

    let pack: Vec<Vec<f64>> = (0..size).map(|_| KeyVector::random(n, rng).0).collect();
    let pack_costs: Vec<i64> = pack.iter().map(|x| eval(inst, &decode_finite(x))).collect();
    let worst = (vec![0.0; n], i64::MAX);
    let mut state = GwoState {
        leaders: [worst.clone(), worst.clone(), worst],
        pack,
        pack_costs,
        a: cfg.gwo.a_start,
    };
    state.rerank();

    let mut r1 = vec![0.0; n];
    let mut r2 = vec![0.0; n];
    for t in 0..cfg.max_iterations {
        let started = Instant::now();
        state.a = interpolate(cfg.gwo.a_start, cfg.gwo.a_end, t, cfg.max_iterations);
        for w in 0..size {
            let mut next = vec![0.0; n];
            for (leader, _) in &state.leaders {
                r1.iter_mut().for_each(|r| *r = rng.random());
                r2.iter_mut().for_each(|r| *r = rng.random());
                let target = encircle(leader, &state.pack[w], state.a, &r1, &r2);
                next.iter_mut().zip(target).for_each(|(s, x)| *s += x / 3.0);
            }
            state.pack[w] = next;
        }
        for w in 0..size {
            state.pack_costs[w] = eval(inst, &decode_finite(&state.pack[w]));
        }
        state.rerank();
        inspect(&state);

        let mut stats =
            CandidateStats::from_costs(state.pack_costs.iter().copied()).expect("non-empty");
        stats.best = stats.best.min(state.leaders[0].1);
        rec.record(started, stats, state.leaders[0].1)?;
    }
    let (alpha, alpha_cost) = state.leaders[0].clone();
    Ok(rec.finish(decode_finite(&alpha), alpha_cost))
}

pub fn run_gwo(
    inst: &QapInstance,
    cfg: &SolverConfig,
    rng: &mut SolverRng,
    observer: &mut dyn Observer,
) -> Result<SolverResult> {
    gwo_with_state(inst, cfg, rng, observer, |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::test_support::{check_result, random_instance};
    use crate::solvers::{rng_from_seed, Algorithm, NoopObserver};

    #[test]
    fn zero_a_and_unit_c_collapse_onto_leader() {
        let leader = [0.2, 0.9, 0.4];
        let wolf = [0.7, 0.1, 0.3];
        let out = encircle(&leader, &wolf, 0.0, &[0.3, 0.8, 0.5], &[0.5; 3]);
        assert_eq!(out, leader.to_vec());
    }

    #[test]
    fn leader_order_holds_every_iteration() {
        let inst = random_instance(8, 17);
        let cfg = SolverConfig::defaults_for(Algorithm::Gwo, 8)
            .with_population(12)
            .with_iterations(60);
        let mut checks = 0;
        let res = gwo_with_state(&inst, &cfg, &mut rng_from_seed(4), &mut NoopObserver, |s| {
            let [(_, ca), (_, cb), (_, cd)] = &s.leaders;
            assert!(ca <= cb && cb <= cd);
            let below_delta = s.pack_costs.iter().filter(|&&c| c < *cd).count();
            assert!(below_delta <= 2);
            assert!(s.pack_costs.iter().all(|c| c >= ca));
            checks += 1;
        })
        .unwrap();
        assert_eq!(checks, 60);
        check_result(&inst, &res);
        assert!(res
            .trace
            .windows(2)
            .all(|w| w[1].incumbent <= w[0].incumbent));
    }

    #[test]
    fn tiny_pack_duplicates_leaders() {
        let inst = random_instance(5, 2);
        let cfg = SolverConfig::defaults_for(Algorithm::Gwo, 5)
            .with_population(1)
            .with_iterations(10);
        let res = run_gwo(&inst, &cfg, &mut rng_from_seed(0), &mut NoopObserver).unwrap();
        check_result(&inst, &res);
    }
}
