//! Expected-value bounds for uniform random `N x N` matrices with nonzero
//! probability `p` on a length-`l` datapath.
//!
//! Row and lane degrees of a window are approximately `N(Np, Np(1-p))`; the
//! color count is the max of `2l` of them, and the expected max of `2l`
//! Gaussians is bounded through the moment generating function, which is
//! why the logarithm here is natural.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("length must be positive")]
    ZeroLength,
    #[error("probability {0} outside (0, 1]")]
    Probability(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub n: usize,
    pub p: f64,
    pub l: usize,
}

impl BoundInputs {
    pub fn new(n: usize, p: f64, l: usize) -> Result<Self, BoundError> {
        if n == 0 {
            return Err(BoundError::ZeroDimension);
        }
        if l == 0 {
            return Err(BoundError::ZeroLength);
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(BoundError::Probability(p));
        }
        Ok(BoundInputs { n, p, l })
    }

    pub fn mean_row_nnz(&self) -> f64 {
        self.n as f64 * self.p
    }

    /// The normal approximation needs `N > 9(1-p)/p`, i.e. about ten
    /// nonzeros per row. Returns a warning message when it does not hold.
    pub fn regime_warning(&self) -> Option<String> {
        let threshold = 9.0 * (1.0 - self.p) / self.p;
        if (self.n as f64) > threshold {
            None
        } else {
            Some(format!(
                "N*p = {:.3}: fewer than ~10 nonzeros per row (need N > {threshold:.1}); \
                 the normal approximation behind the bounds does not hold",
                self.mean_row_nnz()
            ))
        }
    }

    fn spread(&self) -> f64 {
        let np = self.mean_row_nnz();
        (2.0 * np * (1.0 - self.p) * (2.0 * self.l as f64).ln()).sqrt()
    }
}

/// `E[C] <= Np + sqrt(2 Np (1-p) ln 2l)`.
pub fn expected_colors_bound(b: &BoundInputs) -> f64 {
    b.mean_row_nnz() + b.spread()
}

/// `(N/l) * E[C] bound + 2`.
pub fn expected_execution_bound(b: &BoundInputs) -> f64 {
    b.n as f64 / b.l as f64 * expected_colors_bound(b) + 2.0
}

/// `1 / (1 + sqrt(2(1-p) ln 2l) / Np)`, the published closed form.
///
/// Note this is not algebraically equal to `(nnz/l) / (E[exe] - 2)`; that
/// ratio reduces to [`utilization_from_bounds`], which divides by
/// `sqrt(Np)` instead of `Np`.
pub fn expected_utilization(b: &BoundInputs) -> f64 {
    let np = b.mean_row_nnz();
    1.0 / (1.0 + (2.0 * (1.0 - b.p) * (2.0 * b.l as f64).ln()).sqrt() / np)
}

/// `(N²p/l) / (E[exe] bound - 2)`, i.e. `Np / E[C] bound`.
pub fn utilization_from_bounds(b: &BoundInputs) -> f64 {
    b.mean_row_nnz() / expected_colors_bound(b)
}
