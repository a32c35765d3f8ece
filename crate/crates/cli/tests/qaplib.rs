//! Checks on the bundled QAPLIB instance bur26a.

mod common;

use common::data_dir;
use qap_core::{objective, solve, Algorithm, Assignment, SolverConfig};
use qap_harness::config::replication_seed;
use qap_harness::load_instance;

const BUR26A_OPT: i64 = 5_426_670;

// published optimal permutation, converted to 0-based locations
const BUR26A_SOLUTION: [usize; 26] = [
    26, 15, 11, 7, 4, 12, 13, 2, 6, 18, 1, 5, 9, 21, 8, 14, 3, 20, 19, 25, 17, 10, 16, 24, 23, 22,
];

#[test]
fn published_solution_reproduces_optimum() {
    let inst = load_instance(&data_dir().join("bur26a.dat"), false).unwrap();
    let a = Assignment::new(BUR26A_SOLUTION.iter().map(|x| x - 1).collect()).unwrap();
    assert_eq!(objective(&inst, &a).unwrap().0, BUR26A_OPT);
    // the other matrix reading gives a different value
    let swapped = load_instance(&data_dir().join("bur26a.dat"), true).unwrap();
    assert_ne!(objective(&swapped, &a).unwrap().0, BUR26A_OPT);
}

#[test]
fn sa_and_lsh_reach_tolerance_bands() {
    let inst = load_instance(&data_dir().join("bur26a.dat"), false).unwrap();
    for (alg, factor) in [(Algorithm::Sa, 1.05), (Algorithm::Lsh, 1.10)] {
        let costs: Vec<i64> = (0..10)
            .map(|r| {
                let cfg =
                    SolverConfig::defaults_for(alg, inst.n()).with_seed(replication_seed(2024, r));
                solve(&inst, &cfg).unwrap().best_cost.0
            })
            .collect();
        assert!(costs.iter().all(|&c| c >= BUR26A_OPT));
        let within = costs
            .iter()
            .filter(|&&c| c as f64 <= factor * BUR26A_OPT as f64)
            .count();
        println!("{alg}: {within}/10 within {factor} x optimum: {costs:?}");
        assert!(
            within >= 8,
            "{alg}: {within}/10 within {factor} x optimum: {costs:?}"
        );
    }
}
