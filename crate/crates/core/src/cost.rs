//! Objective evaluation.
//!
//! `cost` is the full ordered-pair double sum `sum_i sum_j F[i][j] * D[p(i)][p(j)]`,
//! diagonal terms included. Every unordered pair is therefore counted twice on
//! symmetric instances; `Cost::half` gives the single-count value.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{QapError, Result};
use crate::instance::QapInstance;

/// Largest instance accepted by [`brute_force`].
pub const BRUTE_FORCE_MAX_N: usize = 10;

/// Objective value `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cost(pub i64);

impl Cost {
    #[inline]
    pub fn value(self) -> i64 {
        self.0
    }

    /// Value with each unordered pair counted once.
    pub fn half(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn check_dim(inst: &QapInstance, a: &Assignment) -> Result<()> {
    if a.len() != inst.n() {
        return Err(QapError::DimensionMismatch {
            expected: inst.n(),
            found: a.len(),
        });
    }
    Ok(())
}

pub(crate) fn quadratic_unchecked(inst: &QapInstance, perm: &[usize]) -> i64 {
    let f = inst.flow();
    let d = inst.distance();
    let mut total = 0i64;
    for (i, &pi) in perm.iter().enumerate() {
        let frow = f.row(i);
        let drow = d.row(pi);
        for (j, &pj) in perm.iter().enumerate() {
            total += frow[j] * drow[pj];
        }
    }
    total
}

fn linear_unchecked(inst: &QapInstance, perm: &[usize]) -> i64 {
    inst.linear_cost()
        .map(|b| perm.iter().enumerate().map(|(i, &loc)| b.get(loc, i)).sum())
        .unwrap_or(0)
}

/// Quadratic objective of `a`.
pub fn cost(inst: &QapInstance, a: &Assignment) -> Result<Cost> {
    check_dim(inst, a)?;
    Ok(Cost(quadratic_unchecked(inst, a.as_slice())))
}

/// Quadratic objective plus `sum_i B[p(i)][i]`.
pub fn cost_linear(inst: &QapInstance, a: &Assignment) -> Result<Cost> {
    check_dim(inst, a)?;
    if inst.linear_cost().is_none() {
        return Err(QapError::MissingLinearCost);
    }
    let perm = a.as_slice();
    Ok(Cost(
        quadratic_unchecked(inst, perm) + linear_unchecked(inst, perm),
    ))
}

/// The value the solvers minimize: `cost_linear` when the instance carries a
/// linear block, `cost` otherwise.
pub fn objective(inst: &QapInstance, a: &Assignment) -> Result<Cost> {
    check_dim(inst, a)?;
    Ok(Cost(objective_unchecked(inst, a.as_slice())))
}

#[inline]
pub(crate) fn objective_unchecked(inst: &QapInstance, perm: &[usize]) -> i64 {
    quadratic_unchecked(inst, perm) + linear_unchecked(inst, perm)
}

/// Change in [`objective`] when facilities `i` and `j` exchange locations,
/// computed in O(n).
pub fn swap_delta(inst: &QapInstance, a: &Assignment, i: usize, j: usize) -> Result<i64> {
    let n = inst.n();
    check_dim(inst, a)?;
    for index in [i, j] {
        if index >= n {
            return Err(QapError::IndexOutOfBounds { index, n });
        }
    }
    Ok(swap_delta_unchecked(inst, a.as_slice(), i, j))
}

pub(crate) fn swap_delta_unchecked(inst: &QapInstance, p: &[usize], i: usize, j: usize) -> i64 {
    if i == j {
        return 0;
    }
    let f = inst.flow();
    let d = inst.distance();
    let (pi, pj) = (p[i], p[j]);
    let (fi, fj) = (f.row(i), f.row(j));
    let (dpi, dpj) = (d.row(pi), d.row(pj));

    let mut delta = 0i64;
    for (k, &pk) in p.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        let dk = d.row(pk);
        // column terms: flow into i/j from k
        delta += f.get(k, i) * (dk[pj] - dk[pi]) + f.get(k, j) * (dk[pi] - dk[pj]);
        // row terms: flow out of i/j to k
        delta += fi[k] * (dpj[pk] - dpi[pk]) + fj[k] * (dpi[pk] - dpj[pk]);
    }
    delta += fi[i] * (dpj[pj] - dpi[pi]) + fj[j] * (dpi[pi] - dpj[pj]);
    delta += fi[j] * (dpj[pi] - dpi[pj]) + fj[i] * (dpi[pj] - dpj[pi]);

    if let Some(b) = inst.linear_cost() {
        delta += b.get(pj, i) + b.get(pi, j) - b.get(pi, i) - b.get(pj, j);
    }
    delta
}

/// Exhaustive minimization of [`objective`] for `n <= 10`.
///
/// Permutations are visited in lexicographic order and only strict
/// improvements replace the incumbent, so ties resolve to the
/// lexicographically smallest minimizer.
pub fn brute_force(inst: &QapInstance) -> Result<(Assignment, Cost)> {
    let n = inst.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(QapError::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let mut search = Enumerator {
        inst,
        perm: Vec::with_capacity(n),
        used: vec![false; n],
        best: None,
    };
    search.descend(0);
    let (perm, value) = search.best.expect("n >= 2 has at least one permutation");
    Ok((Assignment::from_vec_unchecked(perm), Cost(value)))
}

struct Enumerator<'a> {
    inst: &'a QapInstance,
    perm: Vec<usize>,
    used: Vec<bool>,
    best: Option<(Vec<usize>, i64)>,
}

impl Enumerator<'_> {
    /// Cost contribution of placing the next facility at `loc`, given the
    /// facilities already placed.
    fn increment(&self, loc: usize) -> i64 {
        let k = self.perm.len();
        let f = self.inst.flow();
        let d = self.inst.distance();
        let mut add = f.get(k, k) * d.get(loc, loc);
        for (m, &pm) in self.perm.iter().enumerate() {
            add += f.get(m, k) * d.get(pm, loc) + f.get(k, m) * d.get(loc, pm);
        }
        if let Some(b) = self.inst.linear_cost() {
            add += b.get(loc, k);
        }
        add
    }

    fn descend(&mut self, partial: i64) {
        let n = self.used.len();
        if self.perm.len() == n {
            if self.best.as_ref().is_none_or(|(_, v)| partial < *v) {
                self.best = Some((self.perm.clone(), partial));
            }
            return;
        }
        for loc in 0..n {
            if self.used[loc] {
                continue;
            }
            let add = self.increment(loc);
            self.used[loc] = true;
            self.perm.push(loc);
            self.descend(partial + add);
            self.perm.pop();
            self.used[loc] = false;
        }
    }
}
