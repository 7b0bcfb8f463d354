//! Sliding-window detection over streams and feature extraction for
//! collections of time series.
//!
//! A stream is handled as a sequence of fixed-width windows, each treated
//! as an independent batch: fresh normalization, fresh threshold, no state
//! carried across windows. A collection of equal-length series can instead
//! be reduced to one feature row per series and the batch detector applied
//! to the resulting matrix, flagging whole series as anomalous.

use crate::config::StrayConfig;
use crate::detect::{detect, AnomalyReport};
use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::Scalar;
use std::ops::Range;

/// Window geometry: `width` observations per window, sliding by `step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub width: usize,
    pub step: usize,
}

impl WindowSpec {
    pub fn new(width: usize, step: usize) -> Self {
        Self { width, step }
    }

    fn validate(&self) -> Result<()> {
        if self.width == 0 {
            return Err(Error::invalid("window", "width must be at least 1"));
        }
        if self.step == 0 {
            return Err(Error::invalid("step", "must be at least 1"));
        }
        if self.step > self.width {
            return Err(Error::invalid(
                "step",
                "must not exceed the window width (gaps in coverage)",
            ));
        }
        Ok(())
    }
}

/// `[start, end)` index ranges of the windows over a stream of the given
/// length: starts advance by `step` as long as a full window fits. Instead
/// of a final partial window, the last window is clamped flush with the
/// stream end, so every observation is covered exactly once by a full-width
/// window at the tail.
pub fn sliding_windows(stream_length: usize, spec: &WindowSpec) -> Result<Vec<Range<usize>>> {
    spec.validate()?;
    if stream_length < spec.width {
        return Err(Error::StreamTooShort {
            len: stream_length,
            width: spec.width,
        });
    }
    let mut ranges: Vec<Range<usize>> = Vec::new();
    let mut start = 0;
    while start + spec.width <= stream_length {
        ranges.push(start..start + spec.width);
        start += spec.step;
    }
    let flush = stream_length - spec.width;
    if ranges.last().map(|r| r.start) != Some(flush) {
        ranges.push(flush..stream_length);
    }
    Ok(ranges)
}

/// One window's detection report with its position in the stream.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowReport<T> {
    pub window: usize,
    pub start: usize,
    pub end: usize,
    pub report: AnomalyReport<T>,
}

impl<T> WindowReport<T> {
    /// Flagged rows as global observation indices.
    pub fn flagged_rows(&self) -> Vec<usize> {
        self.report
            .flags
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.then_some(self.start + i))
            .collect()
    }
}

/// Applies the batch detector to every full window of `data`.
///
/// Windows are independent; a point covered by several overlapping windows
/// may be flagged in some and not others, and the reports are returned per
/// window rather than merged. Errors are tagged with the window index.
pub fn detect_stream<T: Scalar>(
    data: &DataMatrix<T>,
    config: &StrayConfig<T>,
    spec: &WindowSpec,
) -> Result<Vec<WindowReport<T>>> {
    if spec.width <= config.k {
        return Err(Error::invalid(
            "window",
            format!("width {} must exceed k = {}", spec.width, config.k),
        ));
    }
    let ranges = sliding_windows(data.n_rows(), spec)?;
    ranges
        .into_iter()
        .enumerate()
        .map(|(w, range)| {
            let slice = data.row_range(range.start, range.end);
            match detect(&slice, config) {
                Ok(report) => Ok(WindowReport {
                    window: w,
                    start: range.start,
                    end: range.end,
                    report,
                }),
                Err(e) => Err(e.in_window(w)),
            }
        })
        .collect()
}

/// A collection of equal-length time series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCollection<T> {
    series: Vec<Vec<T>>,
    ids: Vec<String>,
}

impl<T: Scalar> SeriesCollection<T> {
    /// Builds a collection with generated ids `series_0`, `series_1`, ...
    pub fn new(series: Vec<Vec<T>>) -> Result<Self> {
        let ids = (0..series.len()).map(|i| format!("series_{i}")).collect();
        Self::with_ids(series, ids)
    }

    pub fn with_ids(series: Vec<Vec<T>>, ids: Vec<String>) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::EmptyData);
        }
        if ids.len() != series.len() {
            return Err(Error::invalid("ids", "one id per series required"));
        }
        let len = series[0].len();
        if len < MIN_SERIES_LEN {
            return Err(Error::SeriesTooShort {
                len,
                min: MIN_SERIES_LEN,
            });
        }
        for (i, s) in series.iter().enumerate() {
            if s.len() != len {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: len,
                    found: s.len(),
                });
            }
            for (j, v) in s.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { series, ids })
    }

    pub fn n_series(&self) -> usize {
        self.series.len()
    }

    pub fn series_len(&self) -> usize {
        self.series[0].len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn series(&self, i: usize) -> &[T] {
        &self.series[i]
    }
}

/// Shortest series the feature extractor accepts.
pub const MIN_SERIES_LEN: usize = 4;

/// Names of the built-in features, in column order.
pub const FEATURE_NAMES: [&str; 7] = [
    "mean",
    "variance",
    "acf1",
    "trend_slope",
    "spike",
    "level_shift",
    "lumpiness",
];

/// One feature row per series; columns follow [`FEATURE_NAMES`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T: Scalar> {
    pub matrix: DataMatrix<T>,
    pub feature_names: &'static [&'static str],
}

/// Reduces each series to seven features: mean, variance, lag-1
/// autocorrelation, least-squares trend slope, spike (largest absolute
/// first difference), level shift (largest jump between consecutive rolling
/// means of width `len/4`), and lumpiness (variance of the first
/// differences).
///
/// Degenerate series stay finite: a constant series has variance 0, its
/// autocorrelation is defined as 0, and every remaining feature is 0. The
/// built-in set is a stand-in for whatever features suit the application;
/// callers may detect on any pre-built feature matrix instead.
pub fn ts_feature_matrix<T: Scalar>(collection: &SeriesCollection<T>) -> Result<FeatureMatrix<T>> {
    let n = collection.n_series();
    let mut values = Vec::with_capacity(n * FEATURE_NAMES.len());
    for i in 0..n {
        values.extend_from_slice(&series_features(collection.series(i)));
    }
    Ok(FeatureMatrix {
        matrix: DataMatrix::from_flat(values, n, FEATURE_NAMES.len())?,
        feature_names: &FEATURE_NAMES,
    })
}

fn series_features<T: Scalar>(x: &[T]) -> [T; 7] {
    let w = x.len();
    let w_t = T::from_usize(w).unwrap();
    let zero = T::zero();

    let sum = x.iter().fold(zero, |a, &v| a + v);
    let mean = sum / w_t;

    let centered_sq = x.iter().fold(zero, |a, &v| {
        let c = v - mean;
        a + c * c
    });
    let variance = centered_sq / T::from_usize(w - 1).unwrap();

    let acf1 = if centered_sq == zero {
        zero
    } else {
        let num = x
            .windows(2)
            .fold(zero, |a, pair| a + (pair[0] - mean) * (pair[1] - mean));
        num / centered_sq
    };

    // Least-squares slope against t = 0..w-1.
    let t_mean = T::from_usize(w - 1).unwrap() / T::from_usize(2).unwrap();
    let mut st_xy = zero;
    let mut st_tt = zero;
    for (t, &v) in x.iter().enumerate() {
        let tc = T::from_usize(t).unwrap() - t_mean;
        st_xy = st_xy + tc * (v - mean);
        st_tt = st_tt + tc * tc;
    }
    let slope = st_xy / st_tt;

    let diffs: Vec<T> = x.windows(2).map(|p| p[1] - p[0]).collect();
    let spike = diffs.iter().fold(zero, |a, &d| a.max(d.abs()));

    let roll = w / 4;
    let roll_t = T::from_usize(roll).unwrap();
    let mut level_shift = zero;
    let mut prev_mean: Option<T> = None;
    for win in x.windows(roll) {
        let m = win.iter().fold(zero, |a, &v| a + v) / roll_t;
        if let Some(prev) = prev_mean {
            level_shift = level_shift.max((m - prev).abs());
        }
        prev_mean = Some(m);
    }

    let d_mean = diffs.iter().fold(zero, |a, &d| a + d) / T::from_usize(diffs.len()).unwrap();
    let lumpiness = diffs.iter().fold(zero, |a, &d| {
        let c = d - d_mean;
        a + c * c
    }) / T::from_usize(diffs.len() - 1).unwrap();

    [mean, variance, acf1, slope, spike, level_shift, lumpiness]
}
