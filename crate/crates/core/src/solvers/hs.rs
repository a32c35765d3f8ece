//! Random-key harmony search. One new harmony is improvised per iteration
//! and replaces the worst memory member only when strictly better.

use std::time::Instant;

use rand::Rng;

use crate::error::Result;
use crate::instance::QapInstance;
use crate::metrics::CandidateStats;
use crate::perm_ops::{decode_finite, KeyVector};

use super::{eval, Observer, Recorder, SolverConfig, SolverResult, SolverRng};

pub fn run_hs(
    inst: &QapInstance,
    cfg: &SolverConfig,
    rng: &mut SolverRng,
    observer: &mut dyn Observer,
) -> Result<SolverResult> {
    cfg.validate()?;
    let mut rec = Recorder::new(cfg, observer)?;
    let n = inst.n();
    let p = cfg.hs;

    let mut memory: Vec<Vec<f64>> = (0..p.hms).map(|_| KeyVector::random(n, rng).0).collect();
    let mut costs: Vec<i64> = memory
        .iter()
        .map(|h| eval(inst, &decode_finite(h)))
        .collect();

    for _ in 0..cfg.max_iterations {
        let started = Instant::now();
        let harmony: Vec<f64> = (0..n)
            .map(|d| {
                if rng.random::<f64>() < p.hmcr {
                    let mut x = memory[rng.random_range(0..p.hms)][d];
                    if rng.random::<f64>() < p.par {
                        x += rng.random_range(-1.0..=1.0) * p.bandwidth;
                    }
                    x
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        let hc = eval(inst, &decode_finite(&harmony));
        let (worst, &worst_cost) = costs
            .iter()
            .enumerate()
            .max_by_key(|(i, c)| (**c, std::cmp::Reverse(*i)))
            .expect("hms >= 1");
        if hc < worst_cost {
            memory[worst] = harmony;
            costs[worst] = hc;
        }
        let stats = CandidateStats::from_costs(costs.iter().copied()).expect("non-empty");
        rec.record(started, stats, stats.best)?;
    }
    let best = costs
        .iter()
        .enumerate()
        .min_by_key(|(i, c)| (**c, *i))
        .map(|(i, _)| i)
        .expect("hms >= 1");
    Ok(rec.finish(decode_finite(&memory[best]), costs[best]))
}
