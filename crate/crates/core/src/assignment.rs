use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QapError, Result};

/// One-line permutation: `perm[facility] = location`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Assignment(Vec<usize>);

impl Assignment {
    /// Validates that `perm` is a bijection on `0..perm.len()`.
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &loc in &perm {
            if loc >= n {
                return Err(QapError::InvalidPermutation(format!(
                    "location {loc} out of range for n = {n}"
                )));
            }
            if std::mem::replace(&mut seen[loc], true) {
                return Err(QapError::InvalidPermutation(format!(
                    "location {loc} used twice"
                )));
            }
        }
        Ok(Self(perm))
    }

    /// Caller guarantees `perm` is a bijection.
    pub(crate) fn from_vec_unchecked(perm: Vec<usize>) -> Self {
        debug_assert!(Self::new(perm.clone()).is_ok());
        Self(perm)
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        Self(perm)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn location(&self, facility: usize) -> usize {
        self.0[facility]
    }

    /// Exchanges the locations of facilities `i` and `j`.
    #[inline]
    pub fn swap(&mut self, i: usize, j: usize) {
        self.0.swap(i, j);
    }

    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut out = self.clone();
        out.swap(i, j);
        out
    }

    /// Inverse permutation (`location -> facility`).
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (facility, &loc) in self.0.iter().enumerate() {
            inv[loc] = facility;
        }
        Self(inv)
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Number of positions where the two assignments differ.
    pub fn hamming(&self, other: &Self) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl TryFrom<Vec<usize>> for Assignment {
    type Error = QapError;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Assignment> for Vec<usize> {
    fn from(a: Assignment) -> Self {
        a.0
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for loc in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{loc}")?;
            first = false;
        }
        Ok(())
    }
}
