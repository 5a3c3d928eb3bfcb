use crate::error::{Error, Result};
use crate::par;

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    /// Wraps row-major `values`; rejects a length mismatch or non-finite entries.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::domain(format!(
                "dense matrix {rows}x{cols} needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "non-finite value at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.values[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::domain(format!(
                "row {i} has {} columns, expected {cols}",
                rows[i].len()
            )));
        }
        Self::new(rows.len(), cols, rows.concat())
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
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |i| self.get(i, j))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, v) in sums.iter_mut().zip(self.row(i)) {
                *s += v;
            }
        }
        sums
    }

    /// Dense matrix-vector product `self · x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::domain(format!(
                "matvec: matrix has {} columns, vector has length {}",
                self.cols,
                x.len()
            )));
        }
        Ok(par::map_range(self.rows, |i| {
            self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()
        }))
    }

    /// Returns a copy with columns reordered so that new column `j` is old column `order[j]`.
    pub fn select_columns(&self, order: &[usize]) -> Self {
        let mut values = Vec::with_capacity(self.rows * order.len());
        for i in 0..self.rows {
            let row = self.row(i);
            values.extend(order.iter().map(|&j| row[j]));
        }
        Self {
            rows: self.rows,
            cols: order.len(),
            values,
        }
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let c = self.cols;
        &mut self.values[i * c..(i + 1) * c]
    }
}

/// Standard product `a · b`.
///
/// Each output cell accumulates over the inner index in increasing order.
pub fn dense_matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows {
        return Err(Error::domain(format!(
            "matmul: inner dimensions differ ({}x{} · {}x{})",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = DenseMatrix::zeros(a.rows, b.cols);
    par::for_each_row_mut(&mut out.values, b.cols, |i, out_row| {
        for (p, &aip) in a.row(i).iter().enumerate() {
            for (o, &bpj) in out_row.iter_mut().zip(b.row(p)) {
                *o += aip * bpj;
            }
        }
    });
    Ok(out)
}

/// Scales every column to sum to one: `m · diag(1ᵀ·m)⁻¹`.
///
/// A column with zero (or negative) sum cannot be normalized and is reported
/// by index.
pub fn col_normalize(m: &DenseMatrix) -> Result<DenseMatrix> {
    let sums = m.col_sums();
    if let Some(j) = sums.iter().position(|&s| !(s > 0.0)) {
        return Err(Error::domain(format!(
            "column {j} has sum {} and cannot be normalized",
            sums[j]
        )));
    }
    let mut out = m.clone();
    for i in 0..out.rows {
        for (v, s) in out.row_mut(i).iter_mut().zip(&sums) {
            *v /= s;
        }
    }
    Ok(out)
}

/// Cosine between each column of `d` and `q`. Columns (or a query) with zero
/// norm score 0.
pub fn cosine_columns(d: &DenseMatrix, q: &[f64]) -> Result<Vec<f64>> {
    if q.len() != d.rows {
        return Err(Error::domain(format!(
            "cosine: matrix has {} rows, query has length {}",
            d.rows,
            q.len()
        )));
    }
    let q_norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(par::map_range(d.cols, |j| {
        let mut dot = 0.0;
        let mut sq = 0.0;
        for (z, &qz) in q.iter().enumerate() {
            let v = d.get(z, j);
            dot += v * qz;
            sq += v * v;
        }
        let d_norm = sq.sqrt();
        if d_norm == 0.0 || q_norm == 0.0 {
            0.0
        } else {
            (dot / (d_norm * q_norm)).clamp(-1.0, 1.0)
        }
    }))
}
