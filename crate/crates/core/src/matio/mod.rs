//! Sparse-matrix data model, Matrix Market I/O, synthetic generators and the
//! reference SpMV every simulated result is checked against.

mod generate;
mod market;
mod matrix;

pub use generate::{generate, Distribution, SynthSpec, DEFAULT_ZIPF_EXPONENT};
pub use market::{
    matrix_market_string, parse_matrix_market, parse_matrix_market_str, parse_vector,
    read_matrix_market, read_vector, write_matrix_market, write_matrix_market_file, write_vector,
    write_vector_file,
};
pub use matrix::{reference_spmv, DenseVector, Entry, SparseMatrix};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("entry ({row}, {col}) outside {rows}x{cols}")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry ({row}, {col})")]
    Duplicate { row: usize, col: usize },
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("non-finite vector value at index {index}")]
    NonFiniteVector { index: usize },
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
