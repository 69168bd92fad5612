use crate::error::{Error, Result};

/// Unsorted `(row, col, value)` entries with target dimensions.
#[derive(Debug, Clone, Default)]
pub struct TripletBuffer {
    nrows: usize,
    ncols: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl TripletBuffer {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            ..Default::default()
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Self {
            nrows,
            ncols,
            rows: Vec::with_capacity(cap),
            cols: Vec::with_capacity(cap),
            vals: Vec::with_capacity(cap),
        }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        self.rows.push(row);
        self.cols.push(col);
        self.vals.push(value);
    }

    /// Enlarges the target dimensions; existing entries keep their indices.
    pub fn grow(&mut self, nrows: usize, ncols: usize) {
        self.nrows = self.nrows.max(nrows);
        self.ncols = self.ncols.max(ncols);
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }
}

/// Compressed sparse row matrix with strictly increasing columns per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Duplicates are summed in insertion order, so the result is a pure
/// function of the buffer contents.
pub fn csr_from_triplets(t: &TripletBuffer) -> Result<CsrMatrix> {
    let (nrows, ncols) = (t.nrows, t.ncols);
    for k in 0..t.len() {
        if t.rows[k] >= nrows || t.cols[k] >= ncols {
            return Err(Error::input(format!(
                "triplet ({}, {}) outside a {nrows}x{ncols} matrix",
                t.rows[k], t.cols[k]
            )));
        }
    }

    let mut counts = vec![0usize; nrows + 1];
    for &r in &t.rows {
        counts[r + 1] += 1;
    }
    for i in 0..nrows {
        counts[i + 1] += counts[i];
    }
    let mut order = vec![0usize; t.len()];
    let mut next = counts.clone();
    for (k, &r) in t.rows.iter().enumerate() {
        order[next[r]] = k;
        next[r] += 1;
    }

    let mut row_ptr = Vec::with_capacity(nrows + 1);
    let mut col_idx = Vec::with_capacity(t.len());
    let mut values = Vec::with_capacity(t.len());
    row_ptr.push(0);
    let mut scratch: Vec<usize> = Vec::new();
    for r in 0..nrows {
        scratch.clear();
        scratch.extend_from_slice(&order[counts[r]..counts[r + 1]]);
        scratch.sort_by_key(|&k| t.cols[k]);
        let mut last = usize::MAX;
        for &k in &scratch {
            let c = t.cols[k];
            if c == last {
                *values.last_mut().unwrap() += t.vals[k];
            } else {
                col_idx.push(c);
                values.push(t.vals[k]);
                last = c;
            }
        }
        row_ptr.push(col_idx.len());
    }

    Ok(CsrMatrix {
        nrows,
        ncols,
        row_ptr,
        col_idx,
        values,
    })
}

pub fn spmv(a: &CsrMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != a.ncols {
        return Err(Error::input(format!(
            "spmv dimension mismatch: {}x{} matrix, vector of length {}",
            a.nrows,
            a.ncols,
            x.len()
        )));
    }
    Ok(a.mul_vec(x))
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds from raw parts, checking the structural invariants.
    pub fn from_parts(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let ok = row_ptr.len() == nrows + 1
            && row_ptr[0] == 0
            && row_ptr.windows(2).all(|w| w[0] <= w[1])
            && *row_ptr.last().unwrap() == col_idx.len()
            && col_idx.len() == values.len()
            && (0..nrows).all(|r| {
                let cols = &col_idx[row_ptr[r]..row_ptr[r + 1]];
                cols.windows(2).all(|w| w[0] < w[1]) && cols.iter().all(|&c| c < ncols)
            });
        if !ok {
            return Err(Error::input("malformed CSR structure"));
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
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

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nrows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for i in 0..self.ncols {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                col_idx[next[c]] = r;
                values[next[c]] = v;
                next[c] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr: counts,
            col_idx,
            values,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Row-wise maximum of `|a_ij|·|x_j|`-free infinity norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|r| self.row(r).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Entry-wise sum of two matrices of equal shape.
    pub fn add(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::input("matrix shapes differ"));
        }
        let mut t = TripletBuffer::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        for m in [self, other] {
            for r in 0..m.nrows {
                for (c, v) in m.row(r) {
                    t.push(r, c, v);
                }
            }
        }
        csr_from_triplets(&t)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, row) in d.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        d
    }

    pub fn to_triplets(&self) -> TripletBuffer {
        let mut t = TripletBuffer::with_capacity(self.nrows, self.ncols, self.nnz());
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                t.push(r, c, v);
            }
        }
        t
    }

    /// Cheap fingerprint of the sparsity pattern.
    pub(crate) fn pattern_key(&self) -> (usize, usize, usize, u64) {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.row_ptr.hash(&mut h);
        self.col_idx.hash(&mut h);
        (self.nrows, self.ncols, self.nnz(), h.finish())
    }
}
