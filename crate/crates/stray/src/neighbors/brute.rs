use super::{check_k, dist_sq, Candidate, KnnResult, TopK};
use crate::error::Result;
use crate::matrix::DataMatrix;
use crate::Scalar;
use rayon::prelude::*;

/// Exact k-nearest-neighbour search by scanning every pair of rows.
///
/// For each row the `k` smallest Euclidean distances to the other rows are
/// returned in ascending order; ties at equal distance go to the smaller
/// row index. Rows are searched independently and in parallel, which does
/// not affect the output.
pub fn knn_exact<T: Scalar>(data: &DataMatrix<T>, k: usize) -> Result<KnnResult<T>> {
    check_k(data, k)?;
    let n = data.n_rows();
    let rows: Vec<Vec<(T, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let query = data.row(i);
            let mut top = TopK::new(k);
            for j in 0..n {
                if j == i {
                    continue;
                }
                top.offer(Candidate {
                    dist_sq: dist_sq(query, data.row(j)),
                    index: j,
                });
            }
            top.into_sorted()
                .into_iter()
                .map(|(d2, j)| (d2.sqrt(), j))
                .collect()
        })
        .collect();
    Ok(KnnResult::from_rows(rows, k))
}
