use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Compressed sparse row matrix with non-negative finite values.
///
/// Column indices are strictly increasing within each row and no explicit
/// zeros are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Validates raw CSR arrays.
    pub fn from_csr(
        rows: usize,
        cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if indptr.len() != rows + 1 || indptr[0] != 0 {
            return Err(Error::domain("CSR row offsets malformed"));
        }
        if indices.len() != values.len() || *indptr.last().unwrap() != indices.len() {
            return Err(Error::domain(
                "CSR index/value arrays disagree with offsets",
            ));
        }
        for i in 0..rows {
            let (lo, hi) = (indptr[i], indptr[i + 1]);
            if lo > hi {
                return Err(Error::domain(format!("CSR offsets decrease at row {i}")));
            }
            let row = &indices[lo..hi];
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::domain(format!(
                    "row {i}: column indices not strictly increasing"
                )));
            }
            if row.last().is_some_and(|&j| j >= cols) {
                return Err(Error::domain(format!("row {i}: column index out of range")));
            }
            if let Some(v) = values[lo..hi]
                .iter()
                .find(|v| !(v.is_finite() && **v > 0.0))
            {
                return Err(Error::domain(format!(
                    "row {i}: stored value {v} not positive"
                )));
            }
        }
        Ok(Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    /// Builds a matrix from unordered `(column, value)` entries per row.
    /// Duplicate columns are summed and zeros dropped.
    pub fn from_row_entries(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows.into_iter() {
            row.sort_by_key(|&(j, _)| j);
            let start = indices.len();
            for (j, v) in row {
                if indices.len() > start && *indices.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    indices.push(j);
                    values.push(v);
                }
            }
            // drop entries that summed to zero
            let mut keep = start;
            for p in start..indices.len() {
                if values[p] != 0.0 {
                    indices[keep] = indices[p];
                    values[keep] = values[p];
                    keep += 1;
                }
            }
            indices.truncate(keep);
            values.truncate(keep);
            indptr.push(indices.len());
        }
        Self::from_csr(indptr.len() - 1, cols, indptr, indices, values)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Keeps the positive entries of a dense matrix.
    pub fn from_dense(m: &DenseMatrix) -> Result<Self> {
        let rows = (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(j, v)| (j, *v))
                    .collect()
            })
            .collect();
        Self::from_row_entries(m.cols(), rows)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    /// Entry `(i, j)`, zero when not stored.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, vals) = self.row(i);
        match idx.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).1.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for (&j, &v) in self.indices.iter().zip(&self.values) {
            sums[j] += v;
        }
        sums
    }

    /// Dot product of row `i` with dense `x`.
    #[inline]
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (idx, vals) = self.row(i);
        idx.iter().zip(vals).map(|(&j, v)| v * x[j]).sum()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut values = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            let (idx, vals) = self.row(i);
            for (&j, &v) in idx.iter().zip(vals) {
                values[i * self.cols + j] = v;
            }
        }
        DenseMatrix::new(self.rows, self.cols, values).expect("finite by construction")
    }

    /// Number of stored scalars (offsets, indices and values).
    pub fn storage_len(&self) -> usize {
        self.indptr.len() + self.indices.len() + self.values.len()
    }
}

/// Divides row `i` of `m` by `v[i]`: `diag(v)⁻¹ · m`.
pub fn diag_inv_scale(v: &[f64], m: &SparseMatrix) -> Result<SparseMatrix> {
    if v.len() != m.rows {
        return Err(Error::domain(format!(
            "diag_inv_scale: {} scale entries for {} rows",
            v.len(),
            m.rows
        )));
    }
    if let Some(i) = v.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::domain(format!(
            "diag_inv_scale: row {i} divisor {} is not positive",
            v[i]
        )));
    }
    let mut out = m.clone();
    for (i, &d) in v.iter().enumerate().take(m.rows) {
        let (lo, hi) = (m.indptr[i], m.indptr[i + 1]);
        for val in &mut out.values[lo..hi] {
            *val /= d;
        }
    }
    // a tiny entry divided by a huge divisor can underflow to zero
    if out.values.contains(&0.0) {
        let rows = (0..out.rows)
            .map(|i| {
                let (idx, vals) = out.row(i);
                idx.iter().copied().zip(vals.iter().copied()).collect()
            })
            .collect();
        return SparseMatrix::from_row_entries(out.cols, rows);
    }
    Ok(out)
}
