//! k-nearest-neighbour search over the rows of a [`DataMatrix`].
//!
//! Two backends with an identical output contract: exact brute force and a
//! kd-tree. Ties at equal distance break towards the smaller row index in
//! both, so the kd-tree in exact mode (`eps = 0`) reproduces brute force
//! bit for bit.

mod brute;
mod kdtree;

pub use brute::knn_exact;
pub use kdtree::{knn_kdtree, KdTree};

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::Scalar;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Per-row ascending k-nearest-neighbour distances and the matching
/// neighbour row indices (self excluded), stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnResult<T: Scalar> {
    k: usize,
    distances: Vec<T>,
    indices: Vec<usize>,
}

impl<T: Scalar> KnnResult<T> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_rows(&self) -> usize {
        self.distances.len() / self.k
    }

    /// Ascending distances from row `i` to its `k` nearest neighbours.
    pub fn row_distances(&self, i: usize) -> &[T] {
        &self.distances[i * self.k..(i + 1) * self.k]
    }

    /// Neighbour row ids matching [`Self::row_distances`].
    pub fn row_indices(&self, i: usize) -> &[usize] {
        &self.indices[i * self.k..(i + 1) * self.k]
    }

    fn from_rows(rows: Vec<Vec<(T, usize)>>, k: usize) -> Self {
        let mut distances = Vec::with_capacity(rows.len() * k);
        let mut indices = Vec::with_capacity(rows.len() * k);
        for row in rows {
            debug_assert_eq!(row.len(), k);
            for (d, i) in row {
                distances.push(d);
                indices.push(i);
            }
        }
        Self {
            k,
            distances,
            indices,
        }
    }
}

#[cfg(test)]
impl<T: Scalar> KnnResult<T> {
    /// Builds a result straight from ascending distance profiles, with
    /// synthetic neighbour ids. Test-only.
    pub(crate) fn from_profiles_for_tests(profiles: Vec<Vec<T>>) -> Self {
        let k = profiles[0].len();
        let rows = profiles
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                assert_eq!(row.len(), k);
                row.into_iter()
                    .enumerate()
                    .map(|(j, d)| (d, if j >= i { j + 1 } else { j }))
                    .collect()
            })
            .collect();
        Self::from_rows(rows, k)
    }
}

pub(crate) fn check_k<T: Scalar>(data: &DataMatrix<T>, k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    if k >= data.n_rows() {
        return Err(Error::TooFewObservations {
            n: data.n_rows(),
            k,
        });
    }
    Ok(())
}

/// Squared Euclidean distance, accumulated in column order so that both
/// search backends produce the same floating-point value for a given pair.
#[inline]
pub(crate) fn dist_sq<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

/// Search candidate ordered by `(distance, row index)`; the index part is
/// what makes ties deterministic.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Candidate<T> {
    pub dist_sq: T,
    pub index: usize,
}

impl<T: Scalar> PartialEq for Candidate<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dist_sq == other.dist_sq && self.index == other.index
    }
}

impl<T: Scalar> Eq for Candidate<T> {}

impl<T: Scalar> PartialOrd for Candidate<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Candidate<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // Distances are finite by the DataMatrix invariant.
        self.dist_sq
            .partial_cmp(&other.dist_sq)
            .expect("finite distances")
            .then_with(|| self.index.cmp(&other.index))
    }
}

/// Keeps the lexicographically smallest `cap` candidates seen so far.
pub(crate) struct TopK<T> {
    cap: usize,
    heap: BinaryHeap<Candidate<T>>,
}

impl<T: Scalar> TopK<T> {
    pub fn new(cap: usize) -> Self {
        Self {
            cap,
            heap: BinaryHeap::with_capacity(cap + 1),
        }
    }

    pub fn is_full(&self) -> bool {
        self.heap.len() == self.cap
    }

    /// Current worst kept squared distance, if the container is full.
    pub fn worst_dist_sq(&self) -> Option<T> {
        if self.is_full() {
            self.heap.peek().map(|c| c.dist_sq)
        } else {
            None
        }
    }

    pub fn offer(&mut self, cand: Candidate<T>) {
        if self.heap.len() < self.cap {
            self.heap.push(cand);
        } else if let Some(top) = self.heap.peek() {
            if cand < *top {
                self.heap.pop();
                self.heap.push(cand);
            }
        }
    }

    /// Candidates in ascending `(distance, index)` order.
    pub fn into_sorted(self) -> Vec<(T, usize)> {
        self.heap
            .into_sorted_vec()
            .into_iter()
            .map(|c| (c.dist_sq, c.index))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topk_keeps_smallest_with_index_ties() {
        let mut top = TopK::new(2);
        for (d, i) in [(2.0, 0), (1.0, 5), (1.0, 3), (0.5, 7), (1.0, 1)] {
            top.offer(Candidate {
                dist_sq: d,
                index: i,
            });
        }
        assert_eq!(top.into_sorted(), vec![(0.5, 7), (1.0, 1)]);
    }

    #[test]
    fn dist_sq_matches_hand_arithmetic() {
        assert_eq!(dist_sq(&[0.0, 0.0], &[3.0, 4.0]), 25.0);
        assert_eq!(dist_sq(&[1.5], &[-0.5]), 4.0);
    }
}
