use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SparseMatrix, SparseVec};
use crate::par;

/// `diag(scale) · sparse + left · rightᵀ`, an `m × n` matrix kept in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePlusRank1 {
    scale: Vec<f64>,
    sparse: SparseMatrix,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl SparsePlusRank1 {
    pub fn new(
        scale: Vec<f64>,
        sparse: SparseMatrix,
        left: Vec<f64>,
        right: Vec<f64>,
    ) -> Result<Self> {
        if scale.len() != sparse.rows() || left.len() != sparse.rows() {
            return Err(Error::domain(format!(
                "sparse-plus-rank-1: scale ({}) and left ({}) must match {} rows",
                scale.len(),
                left.len(),
                sparse.rows()
            )));
        }
        if right.len() != sparse.cols() {
            return Err(Error::domain(format!(
                "sparse-plus-rank-1: right ({}) must match {} columns",
                right.len(),
                sparse.cols()
            )));
        }
        if scale
            .iter()
            .chain(&left)
            .chain(&right)
            .any(|v| !v.is_finite())
        {
            return Err(Error::domain("sparse-plus-rank-1: non-finite factor"));
        }
        Ok(Self {
            scale,
            sparse,
            left,
            right,
        })
    }

    pub fn rows(&self) -> usize {
        self.sparse.rows()
    }

    pub fn cols(&self) -> usize {
        self.sparse.cols()
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn sparse(&self) -> &SparseMatrix {
        &self.sparse
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    /// Entry `(i, j)` without materializing the matrix.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.scale[i] * self.sparse.get(i, j) + self.left[i] * self.right[j]
    }

    /// `self · x` for dense `x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols() {
            return Err(Error::domain(format!(
                "spr1_matvec: matrix has {} columns, vector has length {}",
                self.cols(),
                x.len()
            )));
        }
        let rank1: f64 = self.right.iter().zip(x).map(|(r, v)| r * v).sum();
        Ok(par::map_range(self.rows(), |i| {
            self.scale[i] * self.sparse.row_dot(i, x) + self.left[i] * rank1
        }))
    }

    /// `self · x` for `x` given as `(column, value)` pairs.
    ///
    /// Costs `O(m · |x| · log(row nnz))`, so a short query never touches the
    /// bulk of the sparse part.
    pub fn matvec_sparse(&self, x: &SparseVec) -> Result<Vec<f64>> {
        if let Some(&(j, _)) = x.iter().find(|(j, _)| *j >= self.cols()) {
            return Err(Error::domain(format!(
                "spr1_matvec: index {j} out of range for {} columns",
                self.cols()
            )));
        }
        let rank1: f64 = x.iter().map(|&(j, v)| self.right[j] * v).sum();
        Ok(par::map_range(self.rows(), |i| {
            let dot: f64 = x.iter().map(|&(j, v)| self.sparse.get(i, j) * v).sum();
            self.scale[i] * dot + self.left[i] * rank1
        }))
    }

    /// Materializes the full dense matrix. Intended for tests and small inputs.
    pub fn to_dense(&self) -> DenseMatrix {
        let (m, n) = (self.rows(), self.cols());
        let mut values = vec![0.0; m * n];
        par::for_each_row_mut(&mut values, n, |i, row| {
            for (v, r) in row.iter_mut().zip(&self.right) {
                *v = self.left[i] * r;
            }
            let (idx, vals) = self.sparse.row(i);
            for (&j, &f) in idx.iter().zip(vals) {
                row[j] = self.scale[i] * f + self.left[i] * self.right[j];
            }
        });
        DenseMatrix::new(m, n, values).expect("factors are finite")
    }

    /// Number of stored scalars; `O(nnz + m + n)`.
    pub fn storage_len(&self) -> usize {
        self.scale.len() + self.left.len() + self.right.len() + self.sparse.storage_len()
    }
}

/// `a · x` without densifying `a`.
pub fn spr1_matvec(a: &SparsePlusRank1, x: &[f64]) -> Result<Vec<f64>> {
    a.matvec(x)
}
