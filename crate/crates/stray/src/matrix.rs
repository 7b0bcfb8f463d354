use crate::error::{Error, Result};
use crate::Scalar;

/// Rectangular matrix of finite reals; rows are observations, columns are
/// attributes. Finiteness and shape are enforced at construction so the
/// detectors never see NaN or infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix<T: Scalar> {
    values: Vec<T>,
    n_rows: usize,
    n_cols: usize,
}

impl<T: Scalar> DataMatrix<T> {
    /// Builds a matrix from row-major flat storage.
    pub fn from_flat(values: Vec<T>, n_rows: usize, n_cols: usize) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::EmptyData);
        }
        if values.len() != n_rows * n_cols {
            return Err(Error::invalid(
                "values",
                format!(
                    "flat length {} does not match {n_rows}x{n_cols}",
                    values.len()
                ),
            ));
        }
        for (pos, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: pos / n_cols,
                    col: pos % n_cols,
                });
            }
        }
        Ok(Self {
            values,
            n_rows,
            n_cols,
        })
    }

    /// Builds a matrix from one `Vec` per row; all rows must have the same
    /// length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::EmptyData);
        }
        let n_cols = rows[0].len();
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: n_cols,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(values, rows.len(), n_cols)
    }

    /// Single-column matrix from a vector of values.
    pub fn from_column(values: Vec<T>) -> Result<Self> {
        let n = values.len();
        Self::from_flat(values, n, 1)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[row * self.n_cols + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = T> + '_ {
        self.values[col..].iter().step_by(self.n_cols).copied()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    /// Copies a contiguous row range into a new matrix.
    pub fn row_range(&self, start: usize, end: usize) -> Self {
        debug_assert!(start < end && end <= self.n_rows);
        Self {
            values: self.values[start * self.n_cols..end * self.n_cols].to_vec(),
            n_rows: end - start,
            n_cols: self.n_cols,
        }
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_parts_unchecked(values: Vec<T>, n_rows: usize, n_cols: usize) -> Self {
        debug_assert_eq!(values.len(), n_rows * n_cols);
        Self {
            values,
            n_rows,
            n_cols,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty() {
        assert!(matches!(
            DataMatrix::<f64>::from_rows(vec![]),
            Err(Error::EmptyData)
        ));
        assert!(matches!(
            DataMatrix::<f64>::from_flat(vec![], 0, 3),
            Err(Error::EmptyData)
        ));
    }

    #[test]
    fn rejects_non_finite() {
        let err = DataMatrix::from_flat(vec![1.0, 2.0, f64::NAN, 4.0], 2, 2).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 1, col: 0 }));
        let err = DataMatrix::from_rows(vec![vec![0.0], vec![f64::INFINITY]]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 1, col: 0 }));
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = DataMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(
            err,
            Error::RaggedRow {
                row: 1,
                expected: 2,
                found: 1
            }
        ));
    }

    #[test]
    fn accessors_roundtrip() {
        let m = DataMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]])
            .unwrap();
        assert_eq!(m.n_rows(), 3);
        assert_eq!(m.n_cols(), 2);
        assert_eq!(m.row(1), &[3.0, 4.0]);
        assert_eq!(m.get(2, 1), 6.0);
        assert_eq!(m.column(0).collect::<Vec<_>>(), vec![1.0, 3.0, 5.0]);
        let sub = m.row_range(1, 3);
        assert_eq!(sub.row(0), &[3.0, 4.0]);
        assert_eq!(sub.n_rows(), 2);
    }

    #[test]
    fn single_column_is_accepted() {
        let m = DataMatrix::from_column(vec![0.5, 1.5, 2.5]).unwrap();
        assert_eq!(m.n_cols(), 1);
        assert_eq!(m.n_rows(), 3);
    }
}
