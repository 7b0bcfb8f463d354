//! Column-wise min-max normalization into the unit hypercube.
//!
//! Attributes with large variance would otherwise dominate Euclidean
//! distances; mapping every column onto `[0, 1]` gives them equal weight
//! without changing the shape of the per-column distributions.

use crate::matrix::DataMatrix;
use crate::Scalar;

/// Observed `[min, max]` of one column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnRange<T> {
    pub min: T,
    pub max: T,
}

impl<T: Scalar> ColumnRange<T> {
    pub fn is_constant(&self) -> bool {
        self.min == self.max
    }
}

/// Per-column minima and maxima.
pub fn column_ranges<T: Scalar>(data: &DataMatrix<T>) -> Vec<ColumnRange<T>> {
    let mut ranges: Vec<ColumnRange<T>> = data
        .row(0)
        .iter()
        .map(|&v| ColumnRange { min: v, max: v })
        .collect();
    for row in data.rows().skip(1) {
        for (range, &v) in ranges.iter_mut().zip(row) {
            if v < range.min {
                range.min = v;
            }
            if v > range.max {
                range.max = v;
            }
        }
    }
    ranges
}

/// Maps each column through `x -> (x - min) / (max - min)`.
///
/// Non-constant columns attain both 0 and 1 exactly. A constant column
/// carries no distance information, so it is mapped to all zeros, which
/// keeps the points inside the unit hypercube.
pub fn unitize<T: Scalar>(data: &DataMatrix<T>) -> DataMatrix<T> {
    let ranges = column_ranges(data);
    let mut values = Vec::with_capacity(data.n_rows() * data.n_cols());
    for row in data.rows() {
        for (range, &v) in ranges.iter().zip(row) {
            if range.is_constant() {
                values.push(T::zero());
            } else {
                // Literal subtract-then-divide: keeps the output invariant,
                // bit for bit, under exact affine rescaling of the column.
                values.push((v - range.min) / (range.max - range.min));
            }
        }
    }
    DataMatrix::from_parts_unchecked(values, data.n_rows(), data.n_cols())
}
