use std::fmt;

use serde::{Deserialize, Serialize};

/// An integer frequency vector `xi` in `Z^d`.
///
/// Ordering is lexicographic, which is the canonical order used for every
/// serialized coefficient or design listing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencyIndex(Vec<i64>);

impl FrequencyIndex {
    pub fn new(xi: Vec<i64>) -> Self {
        assert!(!xi.is_empty(), "frequency vectors need at least one component");
        Self(xi)
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    /// `|xi|_inf`.
    pub fn sup_norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// `|xi|_2^2`.
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|&c| (c as f64) * (c as f64)).sum()
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl From<Vec<i64>> for FrequencyIndex {
    fn from(v: Vec<i64>) -> Self {
        Self::new(v)
    }
}

impl<const N: usize> From<[i64; N]> for FrequencyIndex {
    fn from(v: [i64; N]) -> Self {
        Self::new(v.to_vec())
    }
}

impl fmt::Display for FrequencyIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All `xi` with `|xi|_inf <= radius`, in lexicographic order.
pub fn block(dim: usize, radius: u64) -> impl Iterator<Item = FrequencyIndex> {
    let side = 2 * radius as usize + 1;
    let total = side.pow(dim as u32);
    (0..total).map(move |flat| FrequencyIndex(unflatten(flat, dim, radius)))
}

/// Decode a flat block offset (first component slowest) into a frequency tuple.
pub(crate) fn unflatten(mut flat: usize, dim: usize, radius: u64) -> Vec<i64> {
    let side = 2 * radius as usize + 1;
    let mut xi = vec![0i64; dim];
    for j in (0..dim).rev() {
        xi[j] = (flat % side) as i64 - radius as i64;
        flat /= side;
    }
    xi
}
