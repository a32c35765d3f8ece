//! Quadratic assignment problem toolkit.
//!
//! - [`instance`]: the Koopmans-Beckmann instance model and QAPLIB text format
//! - [`cost`]: objective evaluation, O(n) exchange deltas, exhaustive oracle
//! - [`perm_ops`]: mutation, crossover, selection and random-key decoding
//! - [`solvers`]: LSH, GA, PSO, GA-PSO, GWO, HS and SA behind one run contract
//! - [`metrics`]: iteration traces, time statistics, robustness and
//!   strong-convergence diagnostics, replication aggregates

pub mod assignment;
pub mod cost;
pub mod error;
pub mod instance;
pub mod metrics;
pub mod perm_ops;
pub mod solvers;

pub use assignment::Assignment;
pub use cost::{brute_force, cost, cost_linear, objective, swap_delta, Cost};
pub use error::{QapError, Result};
pub use instance::{parse_qaplib, Matrix, QapInstance};
pub use metrics::{IterationTrace, RunStatistics};
pub use solvers::{run, solve, Algorithm, SolverConfig, SolverResult};
