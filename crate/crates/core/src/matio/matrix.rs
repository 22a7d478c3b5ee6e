use serde::{Deserialize, Serialize};

use super::MatrixError;

/// One stored nonzero, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl Entry {
    pub fn new(row: usize, col: usize, value: f64) -> Self {
        Entry { row, col, value }
    }
}

/// Coordinate-form sparse matrix.
///
/// Entries are kept sorted by `(row, col)` with no duplicates, every index is
/// in bounds and every value is finite. The only way to build one is through
/// [`SparseMatrix::from_entries`] (or the parsers/generators built on it), so
/// downstream code can rely on those properties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Entry>,
}

impl SparseMatrix {
    pub fn empty(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    /// Sorts and validates `entries`. Duplicates, out-of-range indices and
    /// non-finite values are rejected.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        mut entries: Vec<Entry>,
    ) -> Result<Self, MatrixError> {
        for e in &entries {
            if e.row >= rows || e.col >= cols {
                return Err(MatrixError::OutOfBounds {
                    row: e.row,
                    col: e.col,
                    rows,
                    cols,
                });
            }
            if !e.value.is_finite() {
                return Err(MatrixError::NonFinite {
                    row: e.row,
                    col: e.col,
                });
            }
        }
        entries.sort_by_key(|e| (e.row, e.col));
        if let Some(w) = entries
            .windows(2)
            .find(|w| (w[0].row, w[0].col) == (w[1].row, w[1].col))
        {
            return Err(MatrixError::Duplicate {
                row: w[0].row,
                col: w[0].col,
            });
        }
        Ok(SparseMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Convenience constructor from `(row, col, value)` triplets.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, MatrixError> {
        let entries = triplets
            .iter()
            .map(|&(r, c, v)| Entry::new(r, c, v))
            .collect();
        Self::from_entries(rows, cols, entries)
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| Entry::new(i, i, 1.0)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// nnz / (rows * cols); 0 for a degenerate shape.
    pub fn density(&self) -> f64 {
        let cells = self.rows as f64 * self.cols as f64;
        if cells == 0.0 {
            0.0
        } else {
            self.nnz() as f64 / cells
        }
    }

    pub fn row_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.rows];
        for e in &self.entries {
            counts[e.row] += 1;
        }
        counts
    }

    /// Entries of each row, in ascending column order.
    pub fn row_slices(&self) -> Vec<&[Entry]> {
        let mut out = Vec::with_capacity(self.rows);
        let mut start = 0;
        for r in 0..self.rows {
            let mut end = start;
            while end < self.entries.len() && self.entries[end].row == r {
                end += 1;
            }
            out.push(&self.entries[start..end]);
            start = end;
        }
        out
    }

    /// Same pattern, values replaced by `f(entry)`. Values must stay finite
    /// and nonzero for the result to remain a faithful copy of the pattern.
    pub fn map_values(&self, mut f: impl FnMut(&Entry) -> f64) -> Self {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|e| Entry::new(e.row, e.col, f(e)))
                .collect(),
        }
    }
}

/// A dense vector operand or result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseVector {
    values: Vec<f64>,
}

impl DenseVector {
    pub fn new(values: Vec<f64>) -> Result<Self, MatrixError> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(MatrixError::NonFiniteVector { index });
        }
        Ok(DenseVector { values })
    }

    pub fn zeros(len: usize) -> Self {
        DenseVector {
            values: vec![0.0; len],
        }
    }

    pub fn ones(len: usize) -> Self {
        DenseVector {
            values: vec![1.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

impl From<DenseVector> for Vec<f64> {
    fn from(v: DenseVector) -> Self {
        v.values
    }
}

/// `y = M v`, summing each row in ascending column order.
pub fn reference_spmv(m: &SparseMatrix, v: &DenseVector) -> Result<DenseVector, MatrixError> {
    if v.len() != m.cols() {
        return Err(MatrixError::DimensionMismatch {
            expected: m.cols(),
            found: v.len(),
        });
    }
    let x = v.as_slice();
    let mut y = vec![0.0; m.rows()];
    for e in m.entries() {
        y[e.row] += e.value * x[e.col];
    }
    Ok(DenseVector { values: y })
}
