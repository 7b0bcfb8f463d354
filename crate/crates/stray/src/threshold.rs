//! Data-driven anomalous threshold from extreme value theory.
//!
//! For score distributions in the maximum domain of attraction of the
//! Gumbel distribution, the spacings between the top order statistics are
//! asymptotically independent exponentials with mean proportional to the
//! inverse rank. The bottom-up search below exploits this: it grows the set
//! of typical points from the smallest scores upwards, fits an exponential
//! mean to the gaps just below the current candidate, and stops at the
//! first gap exceeding the upper `1 - alpha` point of that fit. Everything
//! above the stop becomes anomalous.

use crate::error::{Error, Result};
use crate::{Scalar, MIN_THRESHOLD_SAMPLE};

/// Outcome of the bottom-up threshold search over a score vector.
///
/// `bound` is `None` when no gap ever exceeded its cutoff, in which case no
/// point is flagged. When present, `cutoff_rank` is the 1-based rank (into
/// the ascending scores) whose gap triggered the stop and
/// `bound` equals the sorted score at rank `cutoff_rank - 1`; flags are
/// exactly `score > bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdDecision<T> {
    pub bound: Option<T>,
    pub cutoff_rank: Option<usize>,
    pub flags: Vec<bool>,
    pub log_alpha: T,
}

impl<T> ThresholdDecision<T> {
    pub fn flagged_rows(&self) -> Vec<usize> {
        self.flags
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.then_some(i))
            .collect()
    }
}

/// Top order statistics of a sample with their spacings.
///
/// `order_stats[i]` is the (i+1)-th largest value, `spacings[i]` the drop to
/// the next one, and `standardized[i] = (i+1) * spacings[i]`. Under a
/// Gumbel-domain tail the standardized spacings are approximately iid
/// exponential, which is checkable directly on simulated data.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingDiagnostics<T> {
    pub order_stats: Vec<T>,
    pub spacings: Vec<T>,
    pub standardized: Vec<T>,
}

/// Which gaps feed the exponential-mean estimate at a scan rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FitWindow {
    /// Only gaps strictly below the candidate rank: the candidate cannot
    /// inflate its own cutoff.
    BelowCandidate,
    /// The window slides up by one so the candidate's own gap enters the
    /// estimate. This reproduces the defect of the published HDoutliers
    /// implementation and exists for the baseline only.
    AtCandidate,
}

/// Weighted estimate of the exponential mean spacing at `rank`, using only
/// the gaps strictly below it.
///
/// `gaps` holds the ascending-score gap sequence (`gaps[0]` belongs to rank
/// 1 and is zero by construction). The estimate is
/// `sum over j = 2..=window of (j / (window - 1)) * g[rank - j + 1]`: under
/// exponential tail spacings, rescaling the j-th gap from the top by its
/// rank makes each term an estimate of the same mean, so the sum averages
/// `window - 1` of them. The candidate's own gap `g[rank]` never enters.
pub fn expected_gap<T: Scalar>(gaps: &[T], rank: usize, window: usize) -> Result<T> {
    if window < 2 {
        return Err(Error::invalid("window", "must be at least 2"));
    }
    if rank > gaps.len() || rank < window {
        return Err(Error::GapRankOutOfRange {
            rank,
            window,
            len: gaps.len(),
        });
    }
    // First term (j = 2) uses the gap one rank below the candidate.
    Ok(weighted_gap_sum(gaps, rank - 2, window))
}

/// `sum over j = 2..=window of (j / (window - 1)) * gaps[top - (j - 2)]`.
fn weighted_gap_sum<T: Scalar>(gaps: &[T], top: usize, window: usize) -> T {
    let denom = T::from_usize(window - 1).unwrap();
    let mut acc = T::zero();
    for j in 2..=window {
        let weight = T::from_usize(j).unwrap() / denom;
        acc = acc + weight * gaps[top - (j - 2)];
    }
    acc
}

/// Bottom-up threshold search over anomaly scores.
///
/// Scores are sorted ascending; the scan starts just past the fraction `p`
/// of points assumed typical and walks upward. At rank `i` the gap
/// `g_i = s_(i) - s_(i-1)` is compared against `ln(1/alpha)` times the
/// fitted mean spacing (the upper `1 - alpha` point of the fitted
/// exponential). The first exceedance fixes the bound at `s_(i-1)`; every
/// point scoring above it is flagged. No exceedance means no anomalies.
/// The fit uses at most `tn` gaps so only the upper tail enters.
pub fn bottom_up_threshold<T: Scalar>(
    scores: &[T],
    alpha: T,
    p: T,
    tn: usize,
) -> Result<ThresholdDecision<T>> {
    bottom_up_threshold_with(scores, alpha, p, tn, FitWindow::BelowCandidate)
}

pub(crate) fn bottom_up_threshold_with<T: Scalar>(
    scores: &[T],
    alpha: T,
    p: T,
    tn: usize,
    window: FitWindow,
) -> Result<ThresholdDecision<T>> {
    let n = scores.len();
    if n < MIN_THRESHOLD_SAMPLE {
        return Err(Error::SampleTooSmall {
            n,
            min: MIN_THRESHOLD_SAMPLE,
        });
    }
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::invalid("alpha", "must lie strictly in (0, 1)"));
    }
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::invalid("p", "must lie strictly in (0, 1)"));
    }
    if tn < 2 {
        return Err(Error::invalid("tn", "must be at least 2"));
    }

    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));

    let mut gaps = Vec::with_capacity(n);
    gaps.push(T::zero());
    for r in 1..n {
        gaps.push(sorted[r] - sorted[r - 1]);
    }

    let np = (T::from_usize(n).unwrap() * p)
        .floor()
        .to_usize()
        .unwrap_or(0);
    let n4 = np.min(tn).max(2);
    let start = np.max(1) + 1;
    let log_alpha = alpha.recip().ln();

    let mut bound = None;
    let mut cutoff_rank = None;
    for i in start..=n {
        let ghat = match window {
            FitWindow::BelowCandidate => weighted_gap_sum(&gaps, i - 2, n4),
            FitWindow::AtCandidate => weighted_gap_sum(&gaps, i - 1, n4),
        };
        if gaps[i - 1] > log_alpha * ghat {
            bound = Some(sorted[i - 2]);
            cutoff_rank = Some(i);
            break;
        }
    }

    let flags = match bound {
        Some(b) => scores.iter().map(|&s| s > b).collect(),
        None => vec![false; n],
    };
    Ok(ThresholdDecision {
        bound,
        cutoff_rank,
        flags,
        log_alpha,
    })
}

/// Top-`kmax` descending order statistics of `sample` with spacings and
/// standardized spacings.
pub fn standardized_spacings<T: Scalar>(
    sample: &[T],
    kmax: usize,
) -> Result<SpacingDiagnostics<T>> {
    if kmax < 1 {
        return Err(Error::invalid("kmax", "must be at least 1"));
    }
    if sample.len() <= kmax + 1 {
        return Err(Error::InsufficientSample {
            len: sample.len(),
            kmax,
        });
    }
    let mut work = sample.to_vec();
    // Only the top kmax + 1 values are needed; partial selection keeps this
    // linear for the large simulated samples.
    work.select_nth_unstable_by(kmax, |a, b| b.partial_cmp(a).expect("finite sample"));
    let mut top: Vec<T> = work[..=kmax].to_vec();
    top.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let order_stats: Vec<T> = top[..kmax].to_vec();
    let spacings: Vec<T> = (0..kmax).map(|i| top[i] - top[i + 1]).collect();
    let standardized: Vec<T> = spacings
        .iter()
        .enumerate()
        .map(|(i, &d)| T::from_usize(i + 1).unwrap() * d)
        .collect();
    Ok(SpacingDiagnostics {
        order_stats,
        spacings,
        standardized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp1};

    #[test]
    fn expected_gap_constant_gaps() {
        let gaps = vec![3.0f64; 8];
        // (2/2 + 3/2) * c = 2.5c
        let ghat = expected_gap(&gaps, 5, 3).unwrap();
        assert!((ghat - 7.5).abs() < 1e-12);
    }

    #[test]
    fn expected_gap_zero_gaps() {
        let gaps = vec![0.0; 6];
        assert_eq!(expected_gap(&gaps, 6, 4).unwrap(), 0.0);
    }

    #[test]
    fn expected_gap_direct_substitution() {
        let gaps = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        // (2/2) * g4 + (3/2) * g3 = 3 + 3
        assert_eq!(expected_gap(&gaps, 5, 3).unwrap(), 6.0);
    }

    #[test]
    fn expected_gap_rejects_bad_ranks() {
        let gaps = vec![0.0, 1.0, 2.0];
        assert!(expected_gap(&gaps, 4, 2).is_err());
        assert!(expected_gap(&gaps, 2, 3).is_err());
        assert!(expected_gap(&gaps, 3, 1).is_err());
    }

    #[test]
    fn expected_gap_never_uses_the_candidate_gap() {
        let mut gaps = vec![0.0, 0.4, 0.1, 0.3, 0.2, 0.6];
        let before = expected_gap(&gaps, 5, 3).unwrap();
        gaps[4] = 123.0; // rank 5's own gap
        let after = expected_gap(&gaps, 5, 3).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn identical_scores_yield_no_anomalies() {
        let scores = vec![2.5; 40];
        let decision = bottom_up_threshold(&scores, 0.05, 0.5, 50).unwrap();
        assert_eq!(decision.bound, None);
        assert_eq!(decision.cutoff_rank, None);
        assert!(decision.flags.iter().all(|f| !f));
    }

    #[test]
    fn rejects_small_samples() {
        let scores = vec![1.0; 9];
        assert!(matches!(
            bottom_up_threshold(&scores, 0.05, 0.5, 50),
            Err(Error::SampleTooSmall { n: 9, min: 10 })
        ));
    }

    #[test]
    fn planted_exponential_outlier_is_flagged() {
        // 99 unit-exponential scores plus one at 50; the planted score
        // should be flagged in essentially every replicate.
        let mut hits = 0;
        let trials = 1000;
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut scores: Vec<f64> = (0..99).map(|_| Exp1.sample(&mut rng)).collect();
            scores.push(50.0);
            let decision = bottom_up_threshold(&scores, 0.05, 0.5, 50).unwrap();
            if decision.flags[99] {
                hits += 1;
            }
        }
        assert!(
            hits as f64 / trials as f64 > 0.99,
            "planted outlier flagged in only {hits}/{trials} runs"
        );
    }

    #[test]
    fn alpha_monotonicity_of_the_flagged_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut scores: Vec<f64> = (0..99).map(|_| Exp1.sample(&mut rng)).collect();
        scores.push(50.0);
        let tight = bottom_up_threshold(&scores, 1e-6, 0.5, 50).unwrap();
        let loose = bottom_up_threshold(&scores, 0.1, 0.5, 50).unwrap();
        for i in 0..scores.len() {
            assert!(!tight.flags[i] || loose.flags[i]);
        }
    }

    #[test]
    fn flags_match_bound_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut scores: Vec<f64> = (0..120).map(|_| Exp1.sample(&mut rng)).collect();
        scores.push(30.0);
        let decision = bottom_up_threshold(&scores, 0.05, 0.5, 50).unwrap();
        let bound = decision.bound.expect("planted outlier triggers");
        for (i, &s) in scores.iter().enumerate() {
            assert_eq!(decision.flags[i], s > bound);
        }
        // The bound is the sorted score one rank below the cutoff.
        let mut sorted = scores.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(bound, sorted[decision.cutoff_rank.unwrap() - 2]);
    }

    #[test]
    fn spacings_direct_computation() {
        let diag = standardized_spacings(&[1.0, 2.0, 4.0, 8.0], 2).unwrap();
        assert_eq!(diag.order_stats, vec![8.0, 4.0]);
        assert_eq!(diag.spacings, vec![4.0, 2.0]);
        assert_eq!(diag.standardized, vec![4.0, 4.0]);
    }

    #[test]
    fn spacings_of_constant_sample_are_zero() {
        let diag = standardized_spacings(&[3.0; 12], 5).unwrap();
        assert!(diag.spacings.iter().all(|&s| s == 0.0));
        assert!(diag.standardized.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn spacings_reject_insufficient_samples() {
        assert!(matches!(
            standardized_spacings(&[1.0, 2.0, 3.0], 2),
            Err(Error::InsufficientSample { len: 3, kmax: 2 })
        ));
    }

    #[test]
    fn flawed_window_includes_the_candidate_gap() {
        // With the window at the candidate, a huge top gap inflates its own
        // cutoff: for a small fit window the detection becomes impossible,
        // while the corrected window catches it.
        let mut scores: Vec<f64> = (0..14).map(|i| 0.01 * i as f64).collect();
        scores.push(10.0);
        let correct =
            bottom_up_threshold_with(&scores, 0.05, 0.5, 50, FitWindow::BelowCandidate).unwrap();
        let flawed =
            bottom_up_threshold_with(&scores, 0.05, 0.5, 50, FitWindow::AtCandidate).unwrap();
        assert!(correct.flags[14]);
        assert!(!flawed.flags[14]);
        assert_eq!(flawed.bound, None);
    }
}
