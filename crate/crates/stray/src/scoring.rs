//! Max-gap anomaly scores from k-nearest-neighbour distance profiles.
//!
//! For a row with ascending neighbour distances `d1 <= ... <= dk` the gaps
//! are `Δ1 = d1 - 0` and `Δj = dj - d(j-1)`; the score is the distance at
//! the largest gap. An isolated anomaly peaks at the first gap, while a
//! micro cluster of `m < k` mutually close anomalies peaks at gap `m + 1`,
//! which is what lets the detector see through masking.

use crate::neighbors::KnnResult;
use crate::Scalar;

/// Per-row max-gap scores. `gap_index[i]` is the 1-based rank into row `i`'s
/// ascending profile at which the largest gap occurred, so
/// `scores[i] == distances[i][gap_index[i] - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet<T> {
    pub scores: Vec<T>,
    pub gap_index: Vec<usize>,
}

/// How the gap sequence of a profile starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapMode {
    /// A leading `d1 - 0` gap is included, so an isolated point with a large
    /// nearest-neighbour distance peaks at rank 1. The default.
    WithLeading,
    /// Only differences between consecutive neighbour distances are
    /// considered; kept for comparison. For `k = 1` the score degenerates
    /// to `d1` as in the default mode.
    SuccessiveOnly,
}

/// Max-gap scores in the default [`GapMode::WithLeading`] mode.
pub fn max_gap_scores<T: Scalar>(knn: &KnnResult<T>) -> ScoreSet<T> {
    max_gap_scores_with(knn, GapMode::WithLeading)
}

/// Max-gap scores with an explicit gap rule. Ties on the largest gap break
/// to the smallest rank, which yields the most conservative score.
pub fn max_gap_scores_with<T: Scalar>(knn: &KnnResult<T>, mode: GapMode) -> ScoreSet<T> {
    let n = knn.n_rows();
    let k = knn.k();
    let mut scores = Vec::with_capacity(n);
    let mut gap_index = Vec::with_capacity(n);
    for i in 0..n {
        let d = knn.row_distances(i);
        let (rank, score) = match mode {
            GapMode::WithLeading => {
                let mut best_rank = 1;
                let mut best_gap = d[0];
                for j in 1..k {
                    let gap = d[j] - d[j - 1];
                    if gap > best_gap {
                        best_gap = gap;
                        best_rank = j + 1;
                    }
                }
                (best_rank, d[best_rank - 1])
            }
            GapMode::SuccessiveOnly => {
                if k == 1 {
                    (1, d[0])
                } else {
                    let mut best_rank = 2;
                    let mut best_gap = d[1] - d[0];
                    for j in 2..k {
                        let gap = d[j] - d[j - 1];
                        if gap > best_gap {
                            best_gap = gap;
                            best_rank = j + 1;
                        }
                    }
                    (best_rank, d[best_rank - 1])
                }
            }
        };
        scores.push(score);
        gap_index.push(rank);
    }
    ScoreSet { scores, gap_index }
}
