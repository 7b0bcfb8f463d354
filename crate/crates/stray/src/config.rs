use crate::error::{Error, Result};
use crate::Scalar;

/// Nearest-neighbour search backend.
///
/// Both backends return identical results when the kd-tree runs in exact
/// mode (`eps = 0`); ties at equal distance break towards the smaller row
/// index in both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SearchMethod<T: Scalar> {
    /// Exact all-pairs search.
    Brute,
    /// kd-tree search; `eps = 0` is exact, `eps > 0` allows each returned
    /// distance to exceed the true k-th distance by a factor of `1 + eps`.
    KdTree { eps: T },
}

impl<T: Scalar> SearchMethod<T> {
    pub fn kdtree_exact() -> Self {
        SearchMethod::KdTree { eps: T::zero() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SearchMethod::Brute => "brute",
            SearchMethod::KdTree { .. } => "kdtree",
        }
    }
}

/// Column normalization applied before distance computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizeMode {
    /// Min-max normalization into the unit hypercube.
    Unitize,
    /// Use the data as given.
    None,
}

/// Detection parameters.
///
/// `k` is the neighbourhood size and can be read as the maximum permissible
/// size of a micro cluster: an anomalous cluster with fewer than `k` members
/// is still detectable. `alpha` is the tail probability of the threshold,
/// `start_proportion` the fraction of points assumed typical when the
/// bottom-up threshold search starts, and `tail_count` caps the number of
/// upper-tail gaps used by the exponential fit.
#[derive(Debug, Clone, PartialEq)]
pub struct StrayConfig<T: Scalar> {
    pub k: usize,
    pub alpha: T,
    pub search_method: SearchMethod<T>,
    pub normalize: NormalizeMode,
    pub start_proportion: T,
    pub tail_count: usize,
}

impl<T: Scalar> Default for StrayConfig<T> {
    fn default() -> Self {
        Self {
            k: 10,
            alpha: T::from_f64(0.01).unwrap(),
            search_method: SearchMethod::Brute,
            normalize: NormalizeMode::Unitize,
            start_proportion: T::from_f64(0.5).unwrap(),
            tail_count: 50,
        }
    }
}

impl<T: Scalar> StrayConfig<T> {
    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_alpha(mut self, alpha: T) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_search_method(mut self, method: SearchMethod<T>) -> Self {
        self.search_method = method;
        self
    }

    pub fn with_normalize(mut self, mode: NormalizeMode) -> Self {
        self.normalize = mode;
        self
    }

    pub fn with_start_proportion(mut self, p: T) -> Self {
        self.start_proportion = p;
        self
    }

    pub fn with_tail_count(mut self, tn: usize) -> Self {
        self.tail_count = tn;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        let zero = T::zero();
        let one = T::one();
        if !(self.alpha > zero && self.alpha < one) {
            return Err(Error::invalid("alpha", "must lie strictly in (0, 1)"));
        }
        if !(self.start_proportion > zero && self.start_proportion < one) {
            return Err(Error::invalid("p", "must lie strictly in (0, 1)"));
        }
        if self.tail_count < 2 {
            return Err(Error::invalid("tn", "must be at least 2"));
        }
        if let SearchMethod::KdTree { eps } = self.search_method {
            if !(eps >= zero && eps.is_finite()) {
                return Err(Error::invalid("eps", "must be finite and non-negative"));
            }
        }
        Ok(())
    }
}
