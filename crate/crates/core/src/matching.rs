//! Bottleneck (max-min) perfect matching on complete bipartite weight
//! tables.

use std::cmp::Ordering;

use thiserror::Error;

use crate::graph::Graph;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("sides differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("empty weight table")]
    Empty,
    #[error("expected {expected} weights, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("negative weight at ({row}, {col})")]
    NegativeWeight { row: usize, col: usize },
}

/// Complete bipartite graph with a weight on every pair, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBipartite<T> {
    left: usize,
    right: usize,
    weights: Vec<T>,
}

impl<T: Scalar> WeightedBipartite<T> {
    pub fn new(left: usize, right: usize, weights: Vec<T>) -> Result<Self, MatchingError> {
        if weights.len() != left * right {
            return Err(MatchingError::WrongLength {
                expected: left * right,
                got: weights.len(),
            });
        }
        if let Some(i) = weights.iter().position(|&w| w < T::zero()) {
            return Err(MatchingError::NegativeWeight {
                row: i / right.max(1),
                col: i % right.max(1),
            });
        }
        Ok(WeightedBipartite {
            left,
            right,
            weights,
        })
    }

    pub fn from_fn(
        left: usize,
        right: usize,
        mut f: impl FnMut(usize, usize) -> T,
    ) -> Result<Self, MatchingError> {
        let weights = (0..left)
            .flat_map(|i| (0..right).map(move |j| (i, j)))
            .map(|(i, j)| f(i, j))
            .collect();
        Self::new(left, right, weights)
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> T {
        self.weights[i * self.right + j]
    }

    /// Permutes rows and columns: new row `i` is old row `rows[i]`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Self {
        WeightedBipartite {
            left: self.left,
            right: self.right,
            weights: rows
                .iter()
                .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
                .map(|(i, j)| self.weight(i, j))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult<T> {
    /// `pairing[i]` is the right vertex matched to left vertex `i`.
    pub pairing: Vec<usize>,
    /// Minimum matched weight.
    pub objective: T,
}

fn cmp<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Perfect matching using only pairs whose weight rank is at least
/// `threshold`, by augmenting paths. Left vertices are processed in
/// ascending order and right vertices scanned in ascending order, so the
/// output is deterministic.
fn perfect_matching_at(k: usize, ranks: &[u32], threshold: u32) -> Option<Vec<usize>> {
    fn augment(
        k: usize,
        ranks: &[u32],
        threshold: u32,
        i: usize,
        seen: &mut [bool],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for j in 0..k {
            if seen[j] || ranks[i * k + j] < threshold {
                continue;
            }
            seen[j] = true;
            let free = match match_right[j] {
                None => true,
                Some(other) => augment(k, ranks, threshold, other, seen, match_right),
            };
            if free {
                match_right[j] = Some(i);
                return true;
            }
        }
        false
    }
    let mut match_right: Vec<Option<usize>> = vec![None; k];
    let mut seen = vec![false; k];
    for i in 0..k {
        seen.iter_mut().for_each(|s| *s = false);
        if !augment(k, ranks, threshold, i, &mut seen, &mut match_right) {
            return None;
        }
    }
    let mut pairing = vec![0; k];
    for (j, i) in match_right.into_iter().enumerate() {
        pairing[i.expect("perfect matching covers every right vertex")] = j;
    }
    Some(pairing)
}

/// Maximizes the minimum matched weight by binary search over the
/// distinct weight values.
pub fn bottleneck_matching<T: Scalar>(
    w: &WeightedBipartite<T>,
) -> Result<MatchResult<T>, MatchingError> {
    if w.left != w.right {
        return Err(MatchingError::SizeMismatch {
            left: w.left,
            right: w.right,
        });
    }
    if w.left == 0 {
        return Err(MatchingError::Empty);
    }
    let k = w.left;
    let mut values = w.weights.clone();
    values.sort_by(cmp);
    values.dedup_by(|a, b| cmp(a, b) == Ordering::Equal);
    let ranks: Vec<u32> = w
        .weights
        .iter()
        .map(|x| {
            values
                .binary_search_by(|v| cmp(v, x))
                .expect("weight is listed") as u32
        })
        .collect();
    // Rank `lo` is always feasible (the table is complete); rank `hi` is
    // infeasible when hi < len.
    let (mut lo, mut hi) = (0u32, values.len() as u32);
    let mut best =
        perfect_matching_at(k, &ranks, 0).expect("complete table has a perfect matching");
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match perfect_matching_at(k, &ranks, mid) {
            Some(p) => {
                lo = mid;
                best = p;
            }
            None => hi = mid,
        }
    }
    debug_assert!(
        lo == 0 || perfect_matching_at(k, &ranks, lo - 1).is_some(),
        "feasibility must be monotone"
    );
    let objective = best
        .iter()
        .enumerate()
        .map(|(i, &j)| w.weight(i, j))
        .min_by(cmp)
        .expect("k ≥ 1");
    debug_assert!(cmp(&objective, &values[lo as usize]) == Ordering::Equal);
    Ok(MatchResult {
        pairing: best,
        objective,
    })
}

/// `2 |I_H(u, v)| / max(deg u, deg v)`, or 0 when both degrees are 0.
pub fn pair_weight<T: Scalar>(h: &Graph, u: usize, v: usize) -> T {
    let dmax = h.degree(u).max(h.degree(v));
    if dmax == 0 {
        return T::zero();
    }
    T::from_count(2 * h.intersection_size(u, v)) / T::from_count(dmax)
}

/// Weight tables for `A × B` and `B × C`.
pub fn tripartite_weights<T: Scalar>(
    h: &Graph,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<(WeightedBipartite<T>, WeightedBipartite<T>), MatchingError> {
    if a.len() != b.len() || b.len() != c.len() {
        return Err(MatchingError::SizeMismatch {
            left: a.len(),
            right: b.len().max(c.len()),
        });
    }
    let ab = WeightedBipartite::from_fn(a.len(), b.len(), |i, j| pair_weight(h, a[i], b[j]))?;
    let bc = WeightedBipartite::from_fn(b.len(), c.len(), |i, j| pair_weight(h, b[i], c[j]))?;
    Ok((ab, bc))
}
