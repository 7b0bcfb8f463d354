use super::{check_k, dist_sq, Candidate, KnnResult, TopK};
use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::Scalar;
use rayon::prelude::*;

const LEAF_CAPACITY: usize = 16;

#[derive(Debug, Clone, Copy)]
enum Node {
    /// Left child sits at the next node slot; only the right child index is
    /// stored.
    Split { right: usize },
    Leaf { start: usize, len: usize },
}

/// Axis-aligned space-partitioning tree over the rows of a matrix.
///
/// Built by median split along the dimension of greatest spread, with leaf
/// capacity 16. The build is deterministic (ties on the split coordinate
/// break by row index) and the tree is immutable afterwards, so any number
/// of threads may query it concurrently. Every point lands in exactly one
/// leaf; each node keeps the tight bounding box of its points for pruning.
#[derive(Debug)]
pub struct KdTree<T: Scalar> {
    dims: usize,
    n: usize,
    nodes: Vec<Node>,
    boxes: Vec<T>,
    points: Vec<T>,
    ids: Vec<usize>,
    leaf_count: usize,
}

impl<T: Scalar> KdTree<T> {
    /// Builds the index over all rows of `data`.
    pub fn build(data: &DataMatrix<T>) -> Self {
        let n = data.n_rows();
        let dims = data.n_cols();
        let mut order: Vec<usize> = (0..n).collect();
        let mut tree = Self {
            dims,
            n,
            nodes: Vec::new(),
            boxes: Vec::new(),
            points: Vec::with_capacity(n * dims),
            ids: Vec::with_capacity(n),
            leaf_count: 0,
        };
        tree.build_node(data, &mut order);
        tree
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    fn build_node(&mut self, data: &DataMatrix<T>, order: &mut [usize]) -> usize {
        let pos = self.nodes.len();
        let mut lo = data.row(order[0]).to_vec();
        let mut hi = lo.clone();
        for &idx in order[1..].iter() {
            for (d, &v) in data.row(idx).iter().enumerate() {
                if v < lo[d] {
                    lo[d] = v;
                }
                if v > hi[d] {
                    hi[d] = v;
                }
            }
        }
        self.boxes.extend_from_slice(&lo);
        self.boxes.extend_from_slice(&hi);

        if order.len() <= LEAF_CAPACITY {
            let start = self.ids.len();
            for &idx in order.iter() {
                self.ids.push(idx);
                self.points.extend_from_slice(data.row(idx));
            }
            self.nodes.push(Node::Leaf {
                start,
                len: order.len(),
            });
            self.leaf_count += 1;
            return pos;
        }

        // Dimension of greatest spread; the first maximum wins so the build
        // is deterministic.
        let mut split_dim = 0;
        let mut best = hi[0] - lo[0];
        for d in 1..self.dims {
            let spread = hi[d] - lo[d];
            if spread > best {
                best = spread;
                split_dim = d;
            }
        }
        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |&a, &b| {
            data.get(a, split_dim)
                .partial_cmp(&data.get(b, split_dim))
                .expect("finite coordinates")
                .then(a.cmp(&b))
        });
        self.nodes.push(Node::Split { right: usize::MAX });
        let (left, right) = order.split_at_mut(mid);
        let left_pos = self.build_node(data, left);
        debug_assert_eq!(left_pos, pos + 1);
        let right_pos = self.build_node(data, right);
        self.nodes[pos] = Node::Split { right: right_pos };
        pos
    }

    /// The `k` nearest stored points to `point`, as ascending
    /// `(distance, row id)` pairs; ties break to the smaller row id. With
    /// `eps > 0` the search may return distances up to a factor `1 + eps`
    /// above the true k-th distance. Fewer than `k` pairs are returned only
    /// when the tree holds fewer than `k` points. A stored point equal to
    /// the query is returned like any other (distance zero).
    pub fn query(&self, point: &[T], k: usize, eps: T) -> Vec<(T, usize)> {
        assert_eq!(point.len(), self.dims, "query dimension mismatch");
        assert!(k >= 1, "k must be at least 1");
        assert!(eps >= T::zero(), "eps must be non-negative");
        let mut top = TopK::new(k.min(self.n));
        let one_plus = T::one() + eps;
        let shrink = one_plus * one_plus;
        self.search(0, point, shrink, &mut top);
        top.into_sorted()
            .into_iter()
            .map(|(d2, id)| (d2.sqrt(), id))
            .collect()
    }

    fn search(&self, node: usize, point: &[T], shrink: T, top: &mut TopK<T>) {
        match self.nodes[node] {
            Node::Leaf { start, len } => {
                for slot in start..start + len {
                    let p = &self.points[slot * self.dims..(slot + 1) * self.dims];
                    top.offer(Candidate {
                        dist_sq: dist_sq(point, p),
                        index: self.ids[slot],
                    });
                }
            }
            Node::Split { right } => {
                let left = node + 1;
                let bound_left = self.bound_sq(left, point);
                let bound_right = self.bound_sq(right, point);
                let (first, b_first, second, b_second) = if bound_right < bound_left {
                    (right, bound_right, left, bound_left)
                } else {
                    (left, bound_left, right, bound_right)
                };
                if self.should_visit(b_first, shrink, top) {
                    self.search(first, point, shrink, top);
                }
                if self.should_visit(b_second, shrink, top) {
                    self.search(second, point, shrink, top);
                }
            }
        }
    }

    /// Squared distance from `point` to the node's bounding box, accumulated
    /// in column order. Rounding is monotone per operation, so this never
    /// exceeds the computed distance to any point inside the box; visiting
    /// on equality keeps the index tie-break identical to brute force.
    fn bound_sq(&self, node: usize, point: &[T]) -> T {
        let base = node * 2 * self.dims;
        let lo = &self.boxes[base..base + self.dims];
        let hi = &self.boxes[base + self.dims..base + 2 * self.dims];
        let mut acc = T::zero();
        for d in 0..self.dims {
            let q = point[d];
            let off = if q < lo[d] {
                lo[d] - q
            } else if q > hi[d] {
                q - hi[d]
            } else {
                T::zero()
            };
            acc = acc + off * off;
        }
        acc
    }

    fn should_visit(&self, bound_sq: T, shrink: T, top: &TopK<T>) -> bool {
        match top.worst_dist_sq() {
            None => true,
            Some(worst) => bound_sq * shrink <= worst,
        }
    }
}

/// kd-tree k-nearest-neighbour search with the same output contract as
/// [`knn_exact`](super::knn_exact): with `eps = 0` the result is identical,
/// bit for bit and under the same index tie-break.
///
/// Self-matches are handled by querying `k + 1` neighbours and dropping the
/// zero-distance hit carrying the query's own row id; duplicate rows stay.
pub fn knn_kdtree<T: Scalar>(data: &DataMatrix<T>, k: usize, eps: T) -> Result<KnnResult<T>> {
    check_k(data, k)?;
    if !(eps >= T::zero() && eps.is_finite()) {
        return Err(Error::invalid("eps", "must be finite and non-negative"));
    }
    let tree = KdTree::build(data);
    let rows: Vec<Vec<(T, usize)>> = (0..data.n_rows())
        .into_par_iter()
        .map(|i| {
            let mut found = tree.query(data.row(i), k + 1, eps);
            if let Some(pos) = found.iter().position(|&(_, id)| id == i) {
                found.remove(pos);
            }
            found.truncate(k);
            found
        })
        .collect();
    Ok(KnnResult::from_rows(rows, k))
}
