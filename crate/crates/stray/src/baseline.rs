//! HDoutliers-style detector used as the comparison subject.
//!
//! Version 1 scores every point by its nearest-neighbour distance and
//! thresholds bottom-up. Version 2 first runs the Leader algorithm — a
//! single pass that drops each point into the first existing fixed-radius
//! ball that covers it — then scores and thresholds only one exemplar per
//! cluster, marking every member of a flagged exemplar's cluster anomalous.
//! Both versions can run with the published implementation's threshold
//! defect (the candidate gap entering its own cutoff estimate) or with the
//! corrected window, so the failure modes this detector exhibits on
//! adjacent micro clusters, dense classes and down-sampled thresholds can
//! be reproduced and studied.

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::neighbors::knn_exact;
use crate::normalize::unitize;
use crate::threshold::{bottom_up_threshold_with, FitWindow};
use crate::{Scalar, MIN_THRESHOLD_SAMPLE};

/// Exemplars and memberships produced by one Leader pass.
///
///`membership[i]` is the exemplar row id of row `i`'s cluster; every row is
/// within `radius` (Euclidean, in the space the pass ran in) of its exemplar
/// at assignment time, and each exemplar belongs to its own cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel<T> {
    pub exemplar_rows: Vec<usize>,
    pub membership: Vec<usize>,
    pub radius: T,
}

impl<T> ClusterModel<T> {
    pub fn n_clusters(&self) -> usize {
        self.exemplar_rows.len()
    }

    /// Row ids of the cluster led by `exemplar`.
    pub fn members_of(&self, exemplar: usize) -> Vec<usize> {
        self.membership
            .iter()
            .enumerate()
            .filter_map(|(i, &e)| (e == exemplar).then_some(i))
            .collect()
    }
}

/// Ball radius for the Leader pass: `0.1 / (ln n)^(1/d)`.
///
/// Chosen to sit well below the expected pairwise distance of `n` points
/// spread over the d-dimensional unit hypercube; it approaches 0.1 as the
/// dimension grows.
pub fn default_radius<T: Scalar>(n: usize, d: usize) -> Result<T> {
    if n < 2 {
        return Err(Error::invalid("n", "need at least 2 points for a radius"));
    }
    if d < 1 {
        return Err(Error::invalid("d", "need at least 1 dimension"));
    }
    let n_t = T::from_usize(n).unwrap();
    let d_t = T::from_usize(d).unwrap();
    Ok(T::from_f64(0.1).unwrap() / n_t.ln().powf(d_t.recip()))
}

/// Single-pass fixed-radius clustering in row order.
///
/// A row joins the first existing exemplar within `radius`, otherwise it
/// becomes a new exemplar. The pass is order-dependent by construction and
/// therefore sequential; no shuffling is applied.
pub fn leader_clusters<T: Scalar>(data: &DataMatrix<T>, radius: T) -> Result<ClusterModel<T>> {
    if !(radius > T::zero() && radius.is_finite()) {
        return Err(Error::invalid("radius", "must be positive and finite"));
    }
    let n = data.n_rows();
    let radius_sq = radius * radius;
    let mut exemplar_rows: Vec<usize> = Vec::new();
    let mut membership = Vec::with_capacity(n);
    for i in 0..n {
        let row = data.row(i);
        let leader = exemplar_rows
            .iter()
            .copied()
            .find(|&e| within_sq(row, data.row(e), radius_sq));
        match leader {
            Some(e) => membership.push(e),
            None => {
                exemplar_rows.push(i);
                membership.push(i);
            }
        }
    }
    Ok(ClusterModel {
        exemplar_rows,
        membership,
        radius,
    })
}

/// Squared-distance comparison with early exit once the cutoff is exceeded.
#[inline]
fn within_sq<T: Scalar>(a: &[T], b: &[T], cutoff: T) -> bool {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        acc = acc + d * d;
        if acc > cutoff {
            return false;
        }
    }
    true
}

/// Flags plus provenance for one baseline run.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineReport<T> {
    pub flags: Vec<bool>,
    pub threshold: Option<T>,
    /// Number of scored points: `n` for version 1, the exemplar count for
    /// version 2.
    pub scored_points: usize,
    pub clusters: Option<ClusterModel<T>>,
    pub warnings: Vec<String>,
}

/// HDoutliers-style detection.
///
/// * `use_clustering = false` (version 1): every point is scored by its
///   nearest-neighbour distance.
/// * `use_clustering = true` (version 2): a Leader pass with
///   [`default_radius`] runs first; only exemplars are scored (nearest
///   neighbour among exemplars), and all members of a flagged exemplar's
///   cluster are marked anomalous. When clustering leaves fewer than 10
///   exemplars the threshold cannot be estimated stably; the run returns no
///   flags and a warning instead.
/// * `flawed_threshold = true` reproduces the published implementation,
///   where the candidate gap enters its own cutoff estimate; `false` uses
///   the corrected fit window.
///
/// Data is unitized internally before any distances are computed.
pub fn hdoutliers_detect<T: Scalar>(
    data: &DataMatrix<T>,
    alpha: T,
    use_clustering: bool,
    flawed_threshold: bool,
) -> Result<BaselineReport<T>> {
    let n = data.n_rows();
    if n < MIN_THRESHOLD_SAMPLE {
        return Err(Error::SampleTooSmall {
            n,
            min: MIN_THRESHOLD_SAMPLE,
        });
    }
    let window = if flawed_threshold {
        FitWindow::AtCandidate
    } else {
        FitWindow::BelowCandidate
    };
    let p = T::from_f64(0.5).unwrap();
    let unit = unitize(data);

    if !use_clustering {
        let knn = knn_exact(&unit, 1)?;
        let scores: Vec<T> = (0..n).map(|i| knn.row_distances(i)[0]).collect();
        let decision = bottom_up_threshold_with(&scores, alpha, p, 50, window)?;
        return Ok(BaselineReport {
            flags: decision.flags,
            threshold: decision.bound,
            scored_points: n,
            clusters: None,
            warnings: Vec::new(),
        });
    }

    let radius = default_radius(n, unit.n_cols())?;
    let clusters = leader_clusters(&unit, radius)?;
    let exemplars = clusters.exemplar_rows.clone();
    let m = exemplars.len();
    if m < MIN_THRESHOLD_SAMPLE {
        return Ok(BaselineReport {
            flags: vec![false; n],
            threshold: None,
            scored_points: m,
            clusters: Some(clusters),
            warnings: vec![format!(
                "only {m} exemplars after clustering: not large enough to \
                 yield a stable threshold estimate; nothing was flagged"
            )],
        });
    }

    // Nearest-neighbour distances among exemplars only.
    let exemplar_rows: Vec<Vec<T>> = exemplars.iter().map(|&e| unit.row(e).to_vec()).collect();
    let exemplar_matrix = DataMatrix::from_rows(exemplar_rows)?;
    let knn = knn_exact(&exemplar_matrix, 1)?;
    let scores: Vec<T> = (0..m).map(|i| knn.row_distances(i)[0]).collect();
    let decision = bottom_up_threshold_with(&scores, alpha, p, 50, window)?;

    let mut flags = vec![false; n];
    for (slot, &exemplar) in exemplars.iter().enumerate() {
        if decision.flags[slot] {
            for (row, &leader) in clusters.membership.iter().enumerate() {
                if leader == exemplar {
                    flags[row] = true;
                }
            }
        }
    }
    Ok(BaselineReport {
        flags,
        threshold: decision.bound,
        scored_points: m,
        clusters: Some(clusters),
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{NormalizeMode, StrayConfig};
    use crate::detect::detect;
    use crate::synth::{scenario, Scenario};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_radius_hand_values() {
        let r: f64 = default_radius(10_000, 1).unwrap();
        assert!((r - 0.010857).abs() < 1e-5);
        let r: f64 = default_radius(8, 2).unwrap();
        assert!((r - 0.069347).abs() < 1e-5);
    }

    #[test]
    fn default_radius_approaches_a_tenth_in_high_dimensions() {
        let r: f64 = default_radius(1000, 10_000).unwrap();
        assert!((r - 0.1).abs() < 1e-3);
        assert!(default_radius::<f64>(1, 3).is_err());
    }

    #[test]
    fn leader_pass_hand_trace() {
        let data = DataMatrix::from_column(vec![0.0, 0.05, 1.0]).unwrap();
        let model = leader_clusters(&data, 0.1).unwrap();
        assert_eq!(model.exemplar_rows, vec![0, 2]);
        assert_eq!(model.membership, vec![0, 0, 2]);
        assert_eq!(model.members_of(0), vec![0, 1]);
    }

    #[test]
    fn huge_radius_gives_one_cluster() {
        let data = DataMatrix::from_rows(vec![
            vec![0.0, 0.0],
            vec![0.4, 0.9],
            vec![1.0, 0.2],
            vec![0.3, 0.3],
        ])
        .unwrap();
        let model = leader_clusters(&data, 10.0).unwrap();
        assert_eq!(model.n_clusters(), 1);
        assert!(model.membership.iter().all(|&e| e == 0));
    }

    #[test]
    fn rejects_non_positive_radius() {
        let data = DataMatrix::from_column(vec![0.0, 1.0]).unwrap();
        assert!(leader_clusters(&data, 0.0).is_err());
        assert!(leader_clusters(&data, -1.0).is_err());
    }

    #[test]
    fn members_stay_within_radius_of_their_exemplar() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let values: Vec<f64> = (0..300 * 2).map(|_| rng.random::<f64>()).collect();
        let data = DataMatrix::from_flat(values, 300, 2).unwrap();
        let radius = 0.15;
        let model = leader_clusters(&data, radius).unwrap();
        for (i, &e) in model.membership.iter().enumerate() {
            let d: f64 = data
                .row(i)
                .iter()
                .zip(data.row(e))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(d <= radius + 1e-12, "row {i} is {d} from exemplar {e}");
        }
        for &e in &model.exemplar_rows {
            assert_eq!(model.membership[e], e);
        }
    }

    #[test]
    fn dense_class_collapses_to_a_handful_of_clusters() {
        // Scenario f: 1,000 tightly packed points plus one isolated outlier.
        // The dense class is covered by roughly a dozen balls, so the
        // threshold later runs on a sample about 15 exemplars wide.
        let labeled = scenario::<f64>(Scenario::F, 0);
        let unit = unitize(&labeled.data);
        let radius = default_radius(labeled.data.n_rows(), 2).unwrap();
        let model = leader_clusters(&unit, radius).unwrap();
        let outlier = *labeled.planted.iter().next().unwrap();
        assert!(model.exemplar_rows.contains(&outlier));
        let total = model.n_clusters();
        assert!(
            (10..=16).contains(&total),
            "expected about 15 clusters, found {total}"
        );
    }

    #[test]
    fn version2_flags_the_whole_compact_class_in_scenario_e() {
        let labeled = scenario::<f64>(Scenario::E, 1);
        let report = hdoutliers_detect(&labeled.data, 0.05, true, true).unwrap();
        let false_positives = report
            .flags
            .iter()
            .enumerate()
            .filter(|(i, f)| **f && !labeled.planted.contains(i))
            .count();
        assert!(
            false_positives >= 500,
            "expected the 1000-point compact class flagged, got {false_positives}"
        );
    }

    #[test]
    fn version2_misses_the_isolated_outlier_in_scenario_f() {
        let labeled = scenario::<f64>(Scenario::F, 1);
        let report = hdoutliers_detect(&labeled.data, 0.05, true, true).unwrap();
        let outlier = *labeled.planted.iter().next().unwrap();
        assert!(!report.flags[outlier]);
    }

    #[test]
    fn both_versions_miss_adjacent_micro_clusters_in_scenario_c() {
        let labeled = scenario::<f64>(Scenario::C, 2);
        for use_clustering in [false, true] {
            let report = hdoutliers_detect(&labeled.data, 0.05, use_clustering, true).unwrap();
            for &row in &labeled.planted {
                assert!(
                    !report.flags[row],
                    "clustering={use_clustering}: micro-cluster row {row} was flagged"
                );
            }
        }
    }

    #[test]
    fn too_few_exemplars_surfaces_a_warning() {
        // Two tight blobs far apart: after unitizing, each blob stays well
        // inside one Leader ball, leaving two exemplars.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let base = if i % 2 == 0 { 0.0 } else { 10.0 };
                vec![
                    base + rng.random::<f64>() * 1e-4,
                    base + rng.random::<f64>() * 1e-4,
                ]
            })
            .collect();
        let data = DataMatrix::from_rows(rows).unwrap();
        let report = hdoutliers_detect(&data, 0.05, true, true).unwrap();
        assert!(!report.warnings.is_empty());
        assert!(report.flags.iter().all(|f| !f));
        assert!(report.scored_points < 10);
    }

    #[test]
    fn version1_with_corrected_window_equals_stray_at_k_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rows: Vec<Vec<f64>> = (0..150)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let data = DataMatrix::from_rows(rows).unwrap();
        let baseline = hdoutliers_detect(&data, 0.05, false, false).unwrap();
        let config = StrayConfig::default()
            .with_k(1)
            .with_alpha(0.05)
            .with_normalize(NormalizeMode::Unitize);
        let report = detect(&data, &config).unwrap();
        assert_eq!(baseline.flags, report.flags);
        assert_eq!(baseline.threshold, report.threshold);
    }

    #[test]
    fn version2_flags_whole_clusters_only() {
        let labeled = scenario::<f64>(Scenario::E, 5);
        let report = hdoutliers_detect(&labeled.data, 0.05, true, true).unwrap();
        let clusters = report.clusters.as_ref().unwrap();
        for &e in &clusters.exemplar_rows {
            let members = clusters.members_of(e);
            let flagged = members.iter().filter(|&&r| report.flags[r]).count();
            assert!(
                flagged == 0 || flagged == members.len(),
                "cluster of exemplar {e} is partially flagged"
            );
        }
    }
}
