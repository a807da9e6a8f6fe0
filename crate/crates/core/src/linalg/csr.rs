//! Scalar compressed-sparse-row matrices.
//!
//! Every operator in the solver stack (system matrices, transfer operators,
//! hanging-node interpolation, smoothers) is stored in this one format.
//! Matrices coupling several solution components are stored over the
//! flattened `(node, component)` index in node-major order.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, validating every structural
    /// invariant (monotone row pointers, strictly increasing in-range
    /// column indices, finite values).
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != n_rows + 1 {
            return Err(Error::InvalidCsr(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                n_rows + 1
            )));
        }
        if row_ptr[0] != 0 {
            return Err(Error::InvalidCsr("row_ptr[0] must be 0".into()));
        }
        if col_idx.len() != values.len() || row_ptr[n_rows] != col_idx.len() {
            return Err(Error::InvalidCsr(format!(
                "row_ptr[n_rows]={} but col_idx has {} and values has {} entries",
                row_ptr[n_rows],
                col_idx.len(),
                values.len()
            )));
        }
        for i in 0..n_rows {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidCsr(format!("row_ptr decreases at row {i}")));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            for (k, &c) in cols.iter().enumerate() {
                if c >= n_cols {
                    return Err(Error::InvalidCsr(format!(
                        "column {c} out of range in row {i} (n_cols={n_cols})"
                    )));
                }
                if k > 0 && cols[k - 1] >= c {
                    return Err(Error::InvalidCsr(format!(
                        "columns not strictly increasing in row {i}"
                    )));
                }
            }
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                op: "CsrMatrix::new",
                index: k,
            });
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub(crate) fn from_parts_unchecked(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), n_rows + 1);
        debug_assert_eq!(col_idx.len(), values.len());
        Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_parts_unchecked(n, n, (0..=n).collect(), (0..n).collect(), diag.to_vec())
    }

    /// Builds a matrix from a row-major dense array, dropping exact zeros.
    pub fn from_dense(n_rows: usize, n_cols: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n_rows * n_cols {
            return Err(Error::dim("CsrMatrix::from_dense", n_rows * n_cols, dense.len()));
        }
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..n_rows {
            for j in 0..n_cols {
                let v = dense[i * n_cols + j];
                if v != 0.0 {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self::new(n_rows, n_cols, row_ptr, col_idx, values)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_rows * self.n_cols];
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[i * self.n_cols + j] = v;
            }
        }
        d
    }

    /// Exact structural transpose. Columns of the result are sorted, so
    /// `a.transpose().transpose() == a` holds bit for bit.
    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        // Rows are visited in increasing order, so each output row receives
        // its columns already sorted.
        for i in 0..self.n_rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                let dst = next[j];
                col_idx[dst] = i;
                values[dst] = self.values[k];
                next[j] += 1;
            }
        }
        CsrMatrix::from_parts_unchecked(self.n_cols, self.n_rows, row_ptr, col_idx, values)
    }

    /// True when the matrix equals its transpose bit for bit.
    pub fn is_symmetric(&self) -> bool {
        self.n_rows == self.n_cols && *self == self.transpose()
    }

    /// Kronecker product with the `n_comp`-dimensional identity, giving the
    /// flattened node-major operator that applies `self` to each component.
    pub fn expand_components(&self, n_comp: usize) -> CsrMatrix {
        if n_comp == 1 {
            return self.clone();
        }
        let mut row_ptr = Vec::with_capacity(self.n_rows * n_comp + 1);
        let mut col_idx = Vec::with_capacity(self.nnz() * n_comp);
        let mut values = Vec::with_capacity(self.nnz() * n_comp);
        row_ptr.push(0);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for c in 0..n_comp {
                for (&j, &v) in cols.iter().zip(vals) {
                    col_idx.push(j * n_comp + c);
                    values.push(v);
                }
                row_ptr.push(col_idx.len());
            }
        }
        CsrMatrix::from_parts_unchecked(
            self.n_rows * n_comp,
            self.n_cols * n_comp,
            row_ptr,
            col_idx,
            values,
        )
    }

    /// Largest absolute entry of `self - other`; shapes must agree.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let mut m: f64 = 0.0;
        for i in 0..self.n_rows {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let (ja, jb) = (
                    ca.get(p).copied().unwrap_or(usize::MAX),
                    cb.get(q).copied().unwrap_or(usize::MAX),
                );
                let d = if ja == jb {
                    p += 1;
                    q += 1;
                    va[p - 1] - vb[q - 1]
                } else if ja < jb {
                    p += 1;
                    va[p - 1]
                } else {
                    q += 1;
                    vb[q - 1]
                };
                m = m.max(d.abs());
            }
        }
        m
    }

    /// `alpha · self`, same pattern.
    pub fn scaled(&self, alpha: f64) -> CsrMatrix {
        let mut m = self.clone();
        for v in m.values_mut() {
            *v *= alpha;
        }
        m
    }

    /// `Σ α_k A_k` over matrices of one shape; entries are summed in the
    /// order the terms are given.
    pub fn linear_combination(terms: &[(f64, &CsrMatrix)]) -> Result<CsrMatrix> {
        let first = terms.first().map(|t| t.1).ok_or_else(|| Error::InvalidCsr("empty linear combination".into()))?;
        let (r, c) = (first.n_rows, first.n_cols);
        let nnz = terms.iter().map(|t| t.1.nnz()).sum();
        let mut b = TripletBuilder::with_capacity(r, c, nnz);
        for &(alpha, m) in terms {
            if (m.n_rows, m.n_cols) != (r, c) {
                return Err(Error::dim("linear_combination", r * c, m.n_rows * m.n_cols));
            }
            for i in 0..r {
                let (cols, vals) = m.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    b.add(i, j, alpha * v);
                }
            }
        }
        Ok(b.build())
    }

    /// MatrixMarket coordinate text (1-based indices), for inspection.
    pub fn to_matrix_market(&self) -> String {
        let mut s = String::new();
        s.push_str("%%MatrixMarket matrix coordinate real general\n");
        let _ = writeln!(s, "{} {} {}", self.n_rows, self.n_cols, self.nnz());
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let _ = writeln!(s, "{} {} {:e}", i + 1, j + 1, v);
            }
        }
        s
    }

    pub fn write_matrix_market(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_matrix_market()).map_err(|e| Error::io(path, e))
    }
}

/// Accumulates `(row, col, value)` contributions and compresses them into a
/// [`CsrMatrix`].
///
/// Duplicates are summed in insertion order, so assembling element
/// contributions in a fixed element order gives bit-reproducible matrices.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(n_rows: usize, n_cols: usize, cap: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: Vec::with_capacity(cap),
        }
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        self.entries.push((row, col, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Compresses, summing duplicates in insertion order. Explicitly
    /// stored zeros are kept so sparsity patterns do not depend on
    /// cancellation.
    pub fn build(mut self) -> CsrMatrix {
        // Stable sort keeps insertion order among equal (row, col) keys.
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        self.compress()
    }

    /// Compresses, summing duplicates in ascending order of value.
    ///
    /// The sum for an entry then depends only on the multiset of its
    /// contributions, which makes transposed entries bit-identical whenever
    /// their contribution multisets agree.
    pub fn build_value_ordered(mut self) -> CsrMatrix {
        self.entries
            .sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        self.compress()
    }

    fn compress(self) -> CsrMatrix {
        let mut row_ptr = vec![0usize; self.n_rows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix::from_parts_unchecked(self.n_rows, self.n_cols, row_ptr, col_idx, values)
    }
}
