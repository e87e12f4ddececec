//! Compressed sparse row matrices.

use super::dense::DenseMatrix;
use super::NumericsError;

/// Row-major CSR matrix of `f64`. Exact zeros are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

/// Accumulates `(row, col, value)` entries; duplicates are summed on build.
#[derive(Clone, Debug)]
pub struct Triplets {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, entries: Vec::new() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Self { nrows, ncols, entries: Vec::with_capacity(cap) }
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols, "triplet ({i},{j}) out of bounds");
        if v != 0.0 {
            self.entries.push((i, j, v));
        }
    }

    /// Adds `scale * m` with its origin shifted to `(r0, c0)`.
    pub fn push_block(&mut self, r0: usize, c0: usize, m: &SparseMatrix, scale: f64) {
        debug_assert!(r0 + m.nrows <= self.nrows && c0 + m.ncols <= self.ncols);
        for i in 0..m.nrows {
            for (j, v) in m.row(i) {
                self.push(r0 + i, c0 + j, scale * v);
            }
        }
    }

    pub fn build(mut self) -> SparseMatrix {
        self.entries.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut data = Vec::with_capacity(self.entries.len());
        let mut k = 0;
        while k < self.entries.len() {
            let (i, j, mut v) = self.entries[k];
            k += 1;
            while k < self.entries.len() && self.entries[k].0 == i && self.entries[k].1 == j {
                v += self.entries[k].2;
                k += 1;
            }
            if v != 0.0 {
                indices.push(j);
                data.push(v);
                indptr[i + 1] += 1;
            }
        }
        for i in 0..self.nrows {
            indptr[i + 1] += indptr[i];
        }
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, indptr, indices, data }
    }
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), data: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut t = Triplets::with_capacity(d.len(), d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            t.push(i, i, v);
        }
        t.build()
    }

    pub fn from_triplets(nrows: usize, ncols: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut t = Triplets::with_capacity(nrows, ncols, entries.len());
        for &(i, j, v) in entries {
            t.push(i, j, v);
        }
        t.build()
    }

    pub fn from_dense(d: &DenseMatrix) -> Self {
        let mut t = Triplets::new(d.nrows(), d.ncols());
        for i in 0..d.nrows() {
            for j in 0..d.ncols() {
                t.push(i, j, d[(i, j)]);
            }
        }
        t.build()
    }

    /// Assembles a block matrix. `blocks` holds `(block_row, block_col, matrix)`.
    pub fn from_blocks(
        row_sizes: &[usize],
        col_sizes: &[usize],
        blocks: &[(usize, usize, &SparseMatrix)],
    ) -> Result<Self, NumericsError> {
        let roff = offsets(row_sizes);
        let coff = offsets(col_sizes);
        let nnz: usize = blocks.iter().map(|b| b.2.nnz()).sum();
        let mut t = Triplets::with_capacity(roff[row_sizes.len()], coff[col_sizes.len()], nnz);
        for &(bi, bj, m) in blocks {
            if m.nrows != row_sizes[bi] || m.ncols != col_sizes[bj] {
                return Err(NumericsError::DimensionMismatch(format!(
                    "block ({bi},{bj}) is {}x{}, expected {}x{}",
                    m.nrows, m.ncols, row_sizes[bi], col_sizes[bj]
                )));
            }
            t.push_block(roff[bi], coff[bj], m, 1.0);
        }
        Ok(t.build())
    }

    /// Block-diagonal assembly.
    pub fn block_diag(blocks: &[&SparseMatrix]) -> Self {
        let nr: usize = blocks.iter().map(|b| b.nrows).sum();
        let nc: usize = blocks.iter().map(|b| b.ncols).sum();
        let mut t = Triplets::with_capacity(nr, nc, blocks.iter().map(|b| b.nnz()).sum());
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            t.push_block(r, c, b, 1.0);
            r += b.nrows;
            c += b.ncols;
        }
        t.build()
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    /// Iterates `(col, value)` over the stored entries of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b].iter().copied().zip(self.data[a..b].iter().copied())
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.indptr[i + 1] - self.indptr[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        match self.indices[a..b].binary_search(&j) {
            Ok(k) => self.data[a + k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "matvec dimension mismatch");
        (0..self.nrows).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// `y += alpha * A x`
    pub fn matvec_acc(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let s: f64 = self.row(i).map(|(j, v)| v * x[j]).sum();
            *yi += alpha * s;
        }
    }

    pub fn transpose_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                y[j] += v * x[i];
            }
        }
        y
    }

    /// `xᵀ A y`
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nrows);
        (0..self.nrows).map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>()).sum()
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.bilinear(x, x)
    }

    pub fn transpose(&self) -> Self {
        let mut count = vec![0usize; self.ncols + 1];
        for &j in &self.indices {
            count[j + 1] += 1;
        }
        for j in 0..self.ncols {
            count[j + 1] += count[j];
        }
        let mut next = count.clone();
        let mut indices = vec![0usize; self.nnz()];
        let mut data = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                let k = next[j];
                indices[k] = i;
                data[k] = v;
                next[j] += 1;
            }
        }
        Self { nrows: self.ncols, ncols: self.nrows, indptr: count, indices, data }
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zeros(self.nrows, self.ncols);
        }
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `alpha * self + beta * other`
    pub fn lin_comb(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        assert_eq!(self.shape(), other.shape(), "lin_comb shape mismatch");
        self.merge(other, |a, b| alpha * a + beta * b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lin_comb(1.0, other, -1.0)
    }

    /// Entrywise `f(a_ij, b_ij)` over the union pattern. `f(0, 0)` must be 0.
    fn merge(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut indptr = Vec::with_capacity(self.nrows + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        let put = |j: usize, v: f64, indices: &mut Vec<usize>, data: &mut Vec<f64>| {
            if v != 0.0 {
                indices.push(j);
                data.push(v);
            }
        };
        for i in 0..self.nrows {
            let (mut a, ae) = (self.indptr[i], self.indptr[i + 1]);
            let (mut b, be) = (other.indptr[i], other.indptr[i + 1]);
            while a < ae || b < be {
                let ja = if a < ae { self.indices[a] } else { usize::MAX };
                let jb = if b < be { other.indices[b] } else { usize::MAX };
                if ja == jb {
                    put(ja, f(self.data[a], other.data[b]), &mut indices, &mut data);
                    a += 1;
                    b += 1;
                } else if ja < jb {
                    put(ja, f(self.data[a], 0.0), &mut indices, &mut data);
                    a += 1;
                } else {
                    put(jb, f(0.0, other.data[b]), &mut indices, &mut data);
                    b += 1;
                }
            }
            indptr.push(indices.len());
        }
        Self { nrows: self.nrows, ncols: self.ncols, indptr, indices, data }
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "matmul dimension mismatch");
        let mut acc = vec![0.0; other.ncols];
        let mut mark = vec![usize::MAX; other.ncols];
        let mut cols: Vec<usize> = Vec::new();
        let mut indptr = Vec::with_capacity(self.nrows + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for i in 0..self.nrows {
            cols.clear();
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = 0.0;
                        cols.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            cols.sort_unstable();
            for &j in &cols {
                if acc[j] != 0.0 {
                    indices.push(j);
                    data.push(acc[j]);
                }
            }
            indptr.push(indices.len());
        }
        Self { nrows: self.nrows, ncols: other.ncols, indptr, indices, data }
    }

    /// `diag(d) * self`
    pub fn scale_rows(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.nrows);
        let mut t = Triplets::with_capacity(self.nrows, self.ncols, self.nnz());
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                t.push(i, j, d[i] * v);
            }
        }
        t.build()
    }

    /// `self * diag(d)`
    pub fn scale_cols(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.ncols);
        let mut t = Triplets::with_capacity(self.nrows, self.ncols, self.nnz());
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                t.push(i, j, v * d[j]);
            }
        }
        t.build()
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut cmap = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            cmap[c] = k;
        }
        let mut t = Triplets::new(rows.len(), cols.len());
        for (ri, &r) in rows.iter().enumerate() {
            for (j, v) in self.row(r) {
                if cmap[j] != usize::MAX {
                    t.push(ri, cmap[j], v);
                }
            }
        }
        t.build()
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let rows: Vec<usize> = (0..self.nrows).collect();
        self.select(&rows, cols)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let cols: Vec<usize> = (0..self.ncols).collect();
        self.select(rows, &cols)
    }

    /// `P A Pᵀ` where `perm[new] = old`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        assert_eq!(self.nrows, self.ncols);
        let mut inv = vec![0usize; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut t = Triplets::with_capacity(self.nrows, self.ncols, self.nnz());
        for (i, j, v) in self.triplets() {
            t.push(inv[i], inv[j], v);
        }
        t.build()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.nrows == self.ncols && (0..self.nrows).all(|i| self.row(i).all(|(j, _)| j == i))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.merge(other, |a, b| a - b).max_abs()
    }

    /// `max |A + Aᵀ|`
    pub fn skew_defect(&self) -> f64 {
        self.add(&self.transpose()).max_abs()
    }

    /// `max |A - Aᵀ|`
    pub fn symmetry_defect(&self) -> f64 {
        self.sub(&self.transpose()).max_abs()
    }

    /// `(A - Aᵀ)/2`, exactly antisymmetric in floating point.
    pub fn skew_part(&self) -> Self {
        self.merge(&self.transpose(), |a, b| 0.5 * (a - b))
    }

    /// `(A + Aᵀ)/2`, exactly symmetric in floating point.
    pub fn sym_part(&self) -> Self {
        self.merge(&self.transpose(), |a, b| 0.5 * (a + b))
    }

    /// Rows sorted lexicographically by their `(col, value)` sequences, so two
    /// constraint matrices that differ by a row permutation compare equal.
    pub fn canonical_row_order(&self) -> Self {
        let mut order: Vec<usize> = (0..self.nrows).collect();
        order.sort_by(|&a, &b| {
            let ra: Vec<(usize, f64)> = self.row(a).collect();
            let rb: Vec<(usize, f64)> = self.row(b).collect();
            for (x, y) in ra.iter().zip(rb.iter()) {
                match x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)) {
                    std::cmp::Ordering::Equal => continue,
                    o => return o,
                }
            }
            ra.len().cmp(&rb.len())
        });
        self.select_rows(&order)
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

pub(crate) fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut off = Vec::with_capacity(sizes.len() + 1);
    off.push(0);
    for s in sizes {
        off.push(off.last().unwrap() + s);
    }
    off
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, 1.0), (1, 0, -1.0)]);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn matmul_matches_dense() {
        let a = SparseMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0)]);
        let b = SparseMatrix::from_triplets(3, 2, &[(0, 1, 4.0), (1, 0, 5.0), (2, 0, 6.0)]);
        let c = a.matmul(&b);
        assert_eq!(c.get(0, 0), 12.0);
        assert_eq!(c.get(0, 1), 4.0);
        assert_eq!(c.get(1, 0), 15.0);
        assert_eq!(c.get(1, 1), 0.0);
    }

    #[test]
    fn skew_part_is_exactly_antisymmetric() {
        let a = SparseMatrix::from_triplets(3, 3, &[(0, 1, 0.1), (1, 0, -0.3), (2, 0, 1.0 / 3.0)]);
        let s = a.skew_part();
        assert_eq!(s.skew_defect(), 0.0);
        assert_eq!(a.sym_part().symmetry_defect(), 0.0);
    }

    #[test]
    fn transpose_roundtrip() {
        let a = SparseMatrix::from_triplets(2, 3, &[(0, 2, 1.5), (1, 0, -2.0)]);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().get(2, 0), 1.5);
    }

    #[test]
    fn canonical_order_ignores_row_permutation() {
        let a = SparseMatrix::from_triplets(2, 3, &[(0, 2, 1.0), (1, 0, 1.0)]);
        let b = SparseMatrix::from_triplets(2, 3, &[(1, 2, 1.0), (0, 0, 1.0)]);
        assert_eq!(a.canonical_row_order(), b.canonical_row_order());
    }
}
