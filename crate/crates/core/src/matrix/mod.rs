//! The small linear-algebra layer the ranking models are written against.
//!
//! Only the structured operations the models need are provided: CSR sparse
//! storage for frequency matrices, row-major dense storage for the topic
//! matrices, and [`SparsePlusRank1`], which carries `diag(scale)·S + left·rightᵀ`
//! so that the smoothed probability matrix is never densified for scoring.

mod dense;
mod sparse;
mod structured;

pub use dense::{col_normalize, cosine_columns, dense_matmul, DenseMatrix};
pub use sparse::{diag_inv_scale, SparseMatrix};
pub use structured::{spr1_matvec, SparsePlusRank1};

/// Sparse vector as `(index, value)` pairs.
pub type SparseVec = [(usize, f64)];
