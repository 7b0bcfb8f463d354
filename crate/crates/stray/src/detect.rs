use crate::config::{NormalizeMode, SearchMethod, StrayConfig};
use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::neighbors::{knn_exact, knn_kdtree};
use crate::normalize::unitize;
use crate::scoring::max_gap_scores;
use crate::threshold::bottom_up_threshold;
use crate::{Scalar, MIN_THRESHOLD_SAMPLE};

/// Detection output: a score and a binary flag per observation.
///
/// `flags[i]` is true exactly when `scores[i] > threshold`; when no
/// threshold was found every flag is false. `gap_index[i]` is the 1-based
/// rank in row `i`'s neighbour profile where the maximum gap occurred, so
/// scores can be traced back to a concrete neighbour distance.
#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyReport<T> {
    pub scores: Vec<T>,
    pub gap_index: Vec<usize>,
    pub flags: Vec<bool>,
    pub threshold: Option<T>,
}

impl<T> AnomalyReport<T> {
    pub fn n_anomalies(&self) -> usize {
        self.flags.iter().filter(|f| **f).count()
    }

    pub fn flagged_rows(&self) -> Vec<usize> {
        self.flags
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.then_some(i))
            .collect()
    }
}

/// Runs the full detection pipeline: normalize (if configured), k-nearest
/// neighbours, max-gap scores, bottom-up threshold.
///
/// Deterministic for a fixed input and configuration, and a pure function
/// of both: concurrent calls are safe.
pub fn detect<T: Scalar>(data: &DataMatrix<T>, config: &StrayConfig<T>) -> Result<AnomalyReport<T>> {
    config.validate()?;
    let n = data.n_rows();
    if n < MIN_THRESHOLD_SAMPLE {
        return Err(Error::SampleTooSmall {
            n,
            min: MIN_THRESHOLD_SAMPLE,
        });
    }
    if n <= config.k {
        return Err(Error::TooFewObservations { n, k: config.k });
    }

    let normalized;
    let working = match config.normalize {
        NormalizeMode::Unitize => {
            normalized = unitize(data);
            &normalized
        }
        NormalizeMode::None => data,
    };

    let knn = match config.search_method {
        SearchMethod::Brute => knn_exact(working, config.k)?,
        SearchMethod::KdTree { eps } => knn_kdtree(working, config.k, eps)?,
    };

    let scores = max_gap_scores(&knn);
    let decision = bottom_up_threshold(
        &scores.scores,
        config.alpha,
        config.start_proportion,
        config.tail_count,
    )?;

    Ok(AnomalyReport {
        scores: scores.scores,
        gap_index: scores.gap_index,
        flags: decision.flags,
        threshold: decision.bound,
    })
}
