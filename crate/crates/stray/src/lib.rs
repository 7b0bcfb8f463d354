//! Distance-based anomaly detection for high-dimensional numeric data.
//!
//! Every observation is scored by the largest gap in its ascending
//! k-nearest-neighbour distance profile, and anomalies are separated from
//! typical points by a data-driven threshold obtained from an exponential
//! fit to the upper tail of the scores (a consequence of the Weissman
//! spacing theorem for distributions in the Gumbel maximum domain of
//! attraction). The gap construction lets the detector catch isolated
//! points, inliers sitting between typical clusters, and micro clusters of
//! up to `k - 1` mutually close anomalies that would mask each other under
//! plain nearest-neighbour scoring.
//!
//! The crate also ships:
//!
//! * [`baseline`] — an HDoutliers-style detector (nearest-neighbour scores,
//!   optionally preceded by Leader clustering) used as a comparison subject,
//! * [`streaming`] — sliding-window application to streams and a small
//!   time-series feature extractor for collection-level detection,
//! * [`synth`] — seeded generators for counterexample scenarios plus
//!   false-positive-rate and timing harnesses.
//!
//! ```
//! use stray::{detect, DataMatrix, StrayConfig};
//!
//! // 60 points near the origin and one far away.
//! let mut rows: Vec<Vec<f64>> = (0..60)
//!     .map(|i| vec![(i % 10) as f64 * 0.01, (i / 10) as f64 * 0.01])
//!     .collect();
//! rows.push(vec![5.0, 5.0]);
//!
//! let data = DataMatrix::from_rows(rows).unwrap();
//! let report = detect(&data, &StrayConfig::default()).unwrap();
//! assert!(report.flags[60]);
//! assert_eq!(report.flags.iter().filter(|f| **f).count(), 1);
//! ```

pub mod baseline;
mod config;
mod detect;
mod error;
mod matrix;
pub mod neighbors;
pub mod normalize;
pub mod scoring;
pub mod streaming;
pub mod synth;
pub mod threshold;

pub use config::{NormalizeMode, SearchMethod, StrayConfig};
pub use detect::{detect, AnomalyReport};
pub use error::{Error, Result};
pub use matrix::DataMatrix;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the detectors are generic over.
pub trait Scalar: Float + FromPrimitive + std::fmt::Debug + Send + Sync + 'static {}

impl<T> Scalar for T where T: Float + FromPrimitive + std::fmt::Debug + Send + Sync + 'static {}

/// Minimum number of scores required before the anomalous threshold is
/// considered meaningful.
pub const MIN_THRESHOLD_SAMPLE: usize = 10;

pub type DataMatrixF64 = DataMatrix<f64>;
pub type DataMatrixF32 = DataMatrix<f32>;
pub type StrayConfigF64 = StrayConfig<f64>;
pub type AnomalyReportF64 = AnomalyReport<f64>;
