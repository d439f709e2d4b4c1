//! Row-compressed sparse projection matrix.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{check_len, Error, Result};
use crate::linalg::{norm2, scale};

/// The projection matrix `A` (rays × pixels) in CSR form.
///
/// Coefficients are finite and nonnegative, column indices within a row are
/// strictly increasing. The operator is immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseOperator {
    /// Builds an operator from per-row `(column, value)` lists.
    ///
    /// Entries are sorted, duplicates within a row are summed and exact
    /// zeros are dropped.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            let start = col_idx.len();
            for (j, v) in row {
                validate_entry(i, j, v, cols)?;
                if col_idx.len() > start && *col_idx.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            // drop entries that are exactly zero after merging
            let mut k = start;
            for r in start..col_idx.len() {
                if values[r] != 0.0 {
                    col_idx[k] = col_idx[r];
                    values[k] = values[r];
                    k += 1;
                }
            }
            col_idx.truncate(k);
            values.truncate(k);
            row_ptr.push(col_idx.len());
        }
        Ok(Self { rows: row_ptr.len() - 1, cols, row_ptr, col_idx, values })
    }

    /// Builds an operator from `(row, col, value)` triplets, rejecting duplicates.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut per_row = vec![Vec::new(); rows];
        for &(i, j, v) in triplets {
            if i >= rows {
                return Err(Error::InvalidOperator(format!("row index {i} out of bounds for {rows} rows")));
            }
            validate_entry(i, j, v, cols)?;
            per_row[i].push((j, v));
        }
        for (i, row) in per_row.iter_mut().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidOperator(format!("duplicate entry ({i}, {})", w[0].0)));
            }
        }
        Self::from_rows(cols, per_row)
    }

    /// Builds an operator from a dense row-major matrix, skipping zeros.
    pub fn from_dense(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        check_len(rows * cols, data.len())?;
        let per_row = (0..rows)
            .map(|i| (0..cols).filter(|&j| data[i * cols + j] != 0.0).map(|j| (j, data[i * cols + j])).collect())
            .collect();
        Self::from_rows(cols, per_row)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, &a)| (i, j, a))
        })
    }

    /// `y = A x`
    pub fn apply_forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        let mut y = vec![0.0; self.rows];
        self.forward_into(x, &mut y);
        Ok(y)
    }

    /// `x = Aᵀ r`
    pub fn apply_adjoint(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, r.len())?;
        let mut x = vec![0.0; self.cols];
        self.adjoint_into(r, &mut x);
        Ok(x)
    }

    pub(crate) fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            *yi = c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum();
        }
    }

    pub(crate) fn adjoint_into(&self, r: &[f64], x: &mut [f64]) {
        x.iter_mut().for_each(|v| *v = 0.0);
        for (i, &ri) in r.iter().enumerate() {
            if ri == 0.0 {
                continue;
            }
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                x[j] += a * ri;
            }
        }
    }

    pub(crate) fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.forward_into(x, &mut y);
        y
    }

    pub(crate) fn adjoint(&self, r: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.cols];
        self.adjoint_into(r, &mut x);
        x
    }

    /// Returns `diag(w) A`. Used to fold per-ray weights into the operator.
    pub fn scale_rows(&self, w: &[f64]) -> Result<Self> {
        check_len(self.rows, w.len())?;
        if let Some(bad) = w.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("row scale factors must be positive, got {bad}")));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.values[k] *= w[i];
            }
        }
        Ok(out)
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        let mut map = vec![usize::MAX; self.cols];
        for (k, &j) in columns.iter().enumerate() {
            if j >= self.cols {
                return Err(Error::InvalidArgument(format!("column {j} out of bounds")));
            }
            map[j] = k;
        }
        let rows = (0..self.rows)
            .map(|i| {
                let (c, v) = self.row(i);
                c.iter().zip(v).filter(|(&j, _)| map[j] != usize::MAX).map(|(&j, &a)| (map[j], a)).collect()
            })
            .collect();
        Self::from_rows(columns.len(), rows)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// Spectral norm estimate from `iterations` power steps on `AᵀA`.
    ///
    /// Starts from the constant vector, which has positive overlap with the
    /// leading singular vector of any nonnegative matrix.
    pub fn norm_estimate(&self, iterations: usize) -> f64 {
        if self.nnz() == 0 {
            return 0.0;
        }
        let mut v = vec![1.0 / (self.cols as f64).sqrt(); self.cols];
        let mut sigma = 0.0;
        for _ in 0..iterations.max(1) {
            let w = self.adjoint(&self.forward(&v));
            let nw = norm2(&w);
            if nw == 0.0 {
                return 0.0;
            }
            sigma = nw.sqrt();
            v = w;
            scale(1.0 / nw, &mut v);
        }
        sigma
    }

    /// Writes the plain-text triplet format: a `rows cols nnz` header
    /// followed by one `row col value` line per stored coefficient.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.rows, self.cols, self.nnz())?;
        for (i, j, v) in self.triplets() {
            writeln!(w, "{i} {j} {v:e}")?;
        }
        Ok(())
    }

    pub fn read_triplets<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate().filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let header = header?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse { line: 1, msg: format!("bad header field '{t}'") }))
            .collect::<Result<_>>()?;
        let [rows, cols, nnz] = dims[..] else {
            return Err(Error::Parse { line: 1, msg: "header must be 'rows cols nnz'".into() });
        };
        let mut triplets = Vec::with_capacity(nnz);
        for (k, line) in lines {
            let line = line?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| Error::Parse { line: k + 1, msg: msg.to_string() };
            if parts.len() != 3 {
                return Err(bad("expected 'row col value'"));
            }
            let i = parts[0].parse().map_err(|_| bad("bad row index"))?;
            let j = parts[1].parse().map_err(|_| bad("bad column index"))?;
            let v = parts[2].parse().map_err(|_| bad("bad value"))?;
            triplets.push((i, j, v));
        }
        if triplets.len() != nnz {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares {nnz} entries but {} were read", triplets.len()),
            });
        }
        Self::from_triplets(rows, cols, &triplets)
    }
}

fn validate_entry(i: usize, j: usize, v: f64, cols: usize) -> Result<()> {
    if j >= cols {
        return Err(Error::InvalidOperator(format!("column index {j} out of bounds for {cols} columns")));
    }
    if !v.is_finite() || v < 0.0 {
        return Err(Error::InvalidOperator(format!("coefficient ({i}, {j}) = {v} must be finite and nonnegative")));
    }
    Ok(())
}
