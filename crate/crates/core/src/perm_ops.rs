//! Permutation variation and selection operators.
//!
//! Every operator takes its inputs by reference and returns fresh values.
//! The randomized entry points draw their indices and delegate to a
//! deterministic `*_at` / `*_with_mask` form, which tests can drive directly.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::cost::Cost;
use crate::error::{QapError, Result};

/// Sharpness of the roulette-wheel fitness transform.
pub const ROULETTE_ETA: f64 = 3.0;

/// Random-key encoding: one real priority per facility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyVector(pub Vec<f64>);

impl KeyVector {
    /// Uniform keys in `[0, 1)`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self((0..n).map(|_| rng.random::<f64>()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Members with their cached objective values.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Assignment>,
    pub costs: Vec<Cost>,
}

impl Population {
    pub fn new(members: Vec<Assignment>, costs: Vec<Cost>) -> Result<Self> {
        if members.is_empty() || members.len() != costs.len() {
            return Err(QapError::Contract(format!(
                "population needs matching non-empty lists, got {} members and {} costs",
                members.len(),
                costs.len()
            )));
        }
        Ok(Self { members, costs })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Which mutation operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mutation {
    Insertion,
    Inversion,
    Exchange,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [Mutation::Insertion, Mutation::Inversion, Mutation::Exchange];

    pub fn apply<R: Rng + ?Sized>(self, a: &Assignment, rng: &mut R) -> Assignment {
        match self {
            Mutation::Insertion => insertion_mutation(a, rng),
            Mutation::Inversion => inversion_mutation(a, rng),
            Mutation::Exchange => exchange_mutation(a, rng),
        }
    }
}

fn two_distinct<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// EM: swaps two distinct positions chosen uniformly.
pub fn exchange_mutation<R: Rng + ?Sized>(a: &Assignment, rng: &mut R) -> Assignment {
    debug_assert!(a.len() >= 2);
    let (i, j) = two_distinct(a.len(), rng);
    exchange_at(a, i, j)
}

pub fn exchange_at(a: &Assignment, i: usize, j: usize) -> Assignment {
    a.swapped(i, j)
}

/// ISM: removes one element and reinserts it at a different position.
pub fn insertion_mutation<R: Rng + ?Sized>(a: &Assignment, rng: &mut R) -> Assignment {
    debug_assert!(a.len() >= 2);
    let (from, to) = two_distinct(a.len(), rng);
    insert_at(a, from, to)
}

/// Moves the element at index `from` so that it ends up at index `to`.
pub fn insert_at(a: &Assignment, from: usize, to: usize) -> Assignment {
    let mut v = a.as_slice().to_vec();
    let x = v.remove(from);
    v.insert(to, x);
    Assignment::from_vec_unchecked(v)
}

/// IVM: reverses a uniformly chosen segment `[l, r]`, `l < r`.
pub fn inversion_mutation<R: Rng + ?Sized>(a: &Assignment, rng: &mut R) -> Assignment {
    debug_assert!(a.len() >= 2);
    let (x, y) = two_distinct(a.len(), rng);
    invert_segment(a, x.min(y), x.max(y))
}

pub fn invert_segment(a: &Assignment, l: usize, r: usize) -> Assignment {
    let mut v = a.as_slice().to_vec();
    v[l..=r].reverse();
    Assignment::from_vec_unchecked(v)
}

/// MOX crossover with a uniformly random interleaving of the parents.
pub fn mox_crossover<R: Rng + ?Sized>(
    p1: &Assignment,
    p2: &Assignment,
    rng: &mut R,
) -> Result<(Assignment, Assignment)> {
    let n = p1.len();
    let mut mask: Vec<bool> = (0..2 * n).map(|k| k < n).collect();
    mask.shuffle(rng);
    mox_with_mask(p1, p2, &mask)
}

/// Merges the parents following `mask` (`true` takes the next element of
/// `p1`, `false` the next of `p2`), then child 1 keeps the first occurrence
/// of every element in the merged list and child 2 keeps the last one.
pub fn mox_with_mask(
    p1: &Assignment,
    p2: &Assignment,
    mask: &[bool],
) -> Result<(Assignment, Assignment)> {
    let n = p1.len();
    if p2.len() != n {
        return Err(QapError::DimensionMismatch {
            expected: n,
            found: p2.len(),
        });
    }
    let from_p1 = mask.iter().filter(|&&b| b).count();
    if mask.len() != 2 * n || from_p1 != n {
        return Err(QapError::Contract(format!(
            "interleaving mask must have length {} with {} entries per parent",
            2 * n,
            n
        )));
    }
    let (mut it1, mut it2) = (p1.as_slice().iter(), p2.as_slice().iter());
    let merged: Vec<usize> = mask
        .iter()
        .map(|&take_first| {
            let next = if take_first { it1.next() } else { it2.next() };
            *next.expect("mask counts checked")
        })
        .collect();

    let mut seen = vec![false; n];
    let first: Vec<usize> = merged
        .iter()
        .copied()
        .filter(|&x| !std::mem::replace(&mut seen[x], true))
        .collect();
    seen.fill(false);
    let mut last: Vec<usize> = merged
        .iter()
        .rev()
        .copied()
        .filter(|&x| !std::mem::replace(&mut seen[x], true))
        .collect();
    last.reverse();
    Ok((
        Assignment::from_vec_unchecked(first),
        Assignment::from_vec_unchecked(last),
    ))
}

/// Selection probabilities for a minimization roulette wheel:
/// `w_i = exp(-eta * (z_i - z_min) / (z_max - z_min))`, normalized.
pub fn roulette_probabilities(costs: &[Cost]) -> Vec<f64> {
    let Some(min) = costs.iter().min() else {
        return Vec::new();
    };
    let max = costs.iter().max().expect("non-empty");
    let span = (max.0 - min.0) as f64;
    let weights: Vec<f64> = if span == 0.0 {
        vec![1.0; costs.len()]
    } else {
        costs
            .iter()
            .map(|c| (-ROULETTE_ETA * (c.0 - min.0) as f64 / span).exp())
            .collect()
    };
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Roulette-wheel selection of one member index.
pub fn roulette_select<R: Rng + ?Sized>(pop: &Population, rng: &mut R) -> usize {
    let probs = roulette_probabilities(&pop.costs);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Argsort decoding: facility ranks by ascending key, lower index first on ties.
pub fn decode_keys(k: &KeyVector) -> Result<Assignment> {
    if let Some(pos) = k.0.iter().position(|x| !x.is_finite()) {
        return Err(QapError::NonFinite(pos));
    }
    Ok(decode_finite(&k.0))
}

pub(crate) fn decode_finite(keys: &[f64]) -> Assignment {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
    Assignment::from_vec_unchecked(idx)
}

/// Rearranges the components of `keys` so that they decode to `target`.
///
/// The sorted key values are handed out along `target`; ties among them are
/// separated by the smallest representable steps so the decoding is exact.
pub fn encode_like(keys: &KeyVector, target: &Assignment) -> KeyVector {
    let mut sorted = keys.0.clone();
    sorted.sort_by(f64::total_cmp);
    for r in 1..sorted.len() {
        if sorted[r] <= sorted[r - 1] {
            sorted[r] = sorted[r - 1].next_up();
        }
    }
    let mut out = vec![0.0; keys.len()];
    for (rank, &facility) in target.as_slice().iter().enumerate() {
        out[facility] = sorted[rank];
    }
    KeyVector(out)
}
