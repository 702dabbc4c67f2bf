//! Compressed-row sparse matrices over `Complex64`.
//!
//! This is the storage shared by every construction in the crate. Matrices
//! are immutable once built; all operations return new values.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Default cap on the dimension of any realized operator.
pub const DEFAULT_DIM_CAP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![ONE; n],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// and entries that cancel to exactly zero are dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut data: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) outside {nrows}x{ncols}");
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                data.push(v);
                rows.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_indices = Vec::with_capacity(indices.len());
        let mut keep_data = Vec::with_capacity(data.len());
        for ((r, c), v) in rows.into_iter().zip(indices).zip(data) {
            if v != ZERO {
                indptr[r + 1] += 1;
                keep_indices.push(c);
                keep_data.push(v);
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Self {
            nrows,
            ncols,
            indptr,
            indices: keep_indices,
            data: keep_data,
        }
    }

    /// Builds a matrix from real dense rows; handy for hand-written fixtures.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let triplets = rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(move |(c, v)| (r, c, C64::new(*v, 0.0)))
            })
            .collect();
        Self::from_triplets(nrows, ncols, triplets)
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let mut triplets = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != ZERO {
                    triplets.push((r, c, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), triplets)
    }

    /// A permutation matrix with `P[map[c], c] = 1`, i.e. `P|c> = |map[c]>`.
    pub fn from_column_map(map: &[usize]) -> Self {
        let n = map.len();
        Self::from_triplets(n, n, map.iter().enumerate().map(|(c, &r)| (r, c, ONE)).collect())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.data[span].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(k) => self.data[span.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        if s == ZERO {
            return Self::zeros(self.nrows, self.ncols);
        }
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(ONE, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-ONE, other)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: C64, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let triplets = self
            .iter()
            .chain(other.iter().map(|(r, c, v)| (r, c, s * v)))
            .collect();
        Ok(Self::from_triplets(self.nrows, self.ncols, triplets))
    }

    /// Sums `Σ c_k M_k` in one pass.
    pub fn linear_combination<'a, I>(nrows: usize, ncols: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (C64, &'a SparseMatrix)>,
    {
        let mut triplets = Vec::new();
        for (s, m) in terms {
            if m.shape() != (nrows, ncols) {
                return Err(Error::DimensionMismatch {
                    expected: nrows * ncols,
                    found: m.nrows * m.ncols,
                });
            }
            triplets.extend(m.iter().map(|(r, c, v)| (r, c, s * v)));
        }
        Ok(Self::from_triplets(nrows, ncols, triplets))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.iter().map(|(r, c, v)| (c, r, v)).collect())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.iter().map(|(r, c, v)| (c, r, v.conj())).collect(),
        )
    }

    /// Kronecker product with `self` as the more significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let nrows = self.nrows * other.nrows;
        let ncols = self.ncols * other.ncols;
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.iter() {
            for (r2, c2, v2) in other.iter() {
                triplets.push((r1 * other.nrows + r2, c1 * other.ncols + c2, v1 * v2));
            }
        }
        Self::from_triplets(nrows, ncols, triplets)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: other.nrows,
            });
        }
        let mut triplets = Vec::new();
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    triplets.push((r, c, a * b));
                }
            }
        }
        Ok(Self::from_triplets(self.nrows, other.ncols, triplets))
    }

    pub fn matvec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: x.len(),
            });
        }
        Ok((0..self.nrows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect())
    }

    /// `y += s * self * x` without allocating.
    pub fn matvec_acc(&self, s: C64, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (c, v) in self.row(r) {
                acc += v * x[c];
            }
            *yr += s * acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(self.nrows, self.ncols, ZERO);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .sub(other)?
            .data
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Copy of the submatrix picked out by `rows` x `cols` (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_pos = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            col_pos[c] = k;
        }
        let mut triplets = Vec::new();
        for (k, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                if col_pos[c] != usize::MAX {
                    triplets.push((k, col_pos[c], v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), triplets)
    }

    /// Exactly one entry equal to 1 in every row and every column.
    pub fn is_permutation(&self) -> bool {
        if !self.is_square() || self.nnz() != self.nrows {
            return false;
        }
        let mut seen = vec![false; self.ncols];
        for r in 0..self.nrows {
            let mut row = self.row(r);
            match (row.next(), row.next()) {
                (Some((c, v)), None) if v == ONE && !seen[c] => seen[c] = true,
                _ => return false,
            }
        }
        true
    }

    /// `‖M M† - I‖_max`, used as the unitarity residual.
    pub fn unitarity_error(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.nrows,
                found: self.ncols,
            });
        }
        self.matmul(&self.adjoint())?
            .max_abs_diff(&Self::identity(self.nrows))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.nrows * self.ncols,
                found: other.nrows * other.ncols,
            });
        }
        Ok(())
    }
}

/// Accumulates blocks into one large matrix.
#[derive(Debug)]
pub struct BlockAssembler {
    nrows: usize,
    ncols: usize,
    triplets: Vec<(usize, usize, C64)>,
}

impl BlockAssembler {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            triplets: Vec::new(),
        }
    }

    pub fn add_block(&mut self, row: usize, col: usize, scale: C64, block: &SparseMatrix) {
        assert!(row + block.nrows() <= self.nrows && col + block.ncols() <= self.ncols);
        self.triplets
            .extend(block.iter().map(|(r, c, v)| (row + r, col + c, scale * v)));
    }

    pub fn finish(self) -> SparseMatrix {
        SparseMatrix::from_triplets(self.nrows, self.ncols, self.triplets)
    }
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_inf_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `⟨a, b⟩ = Σ conj(a_i) b_i`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn real_vec(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_cancellations() {
        let m = SparseMatrix::from_triplets(2, 2, vec![(0, 1, c(1.0)), (0, 1, c(2.0)), (1, 0, c(1.0)), (1, 0, c(-1.0))]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0));
        assert_eq!(m.get(1, 0), ZERO);
    }

    #[test]
    fn kron_matches_block_layout() {
        let a = SparseMatrix::from_real_rows(&[vec![1.0, 2.0], vec![0.0, 3.0]]);
        let b = SparseMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let k = a.kron(&b);
        assert_eq!(k.shape(), (4, 4));
        assert_eq!(k.get(0, 1), c(1.0));
        assert_eq!(k.get(0, 3), c(2.0));
        assert_eq!(k.get(3, 2), c(3.0));
        assert_eq!(k.get(2, 0), ZERO);
    }

    #[test]
    fn matmul_against_dense() {
        let a = SparseMatrix::from_real_rows(&[vec![1.0, 2.0, 0.0], vec![0.0, 3.0, -1.0]]);
        let b = SparseMatrix::from_real_rows(&[vec![1.0], vec![0.5], vec![2.0]]);
        let p = a.matmul(&b).unwrap();
        let d = a.to_dense() * b.to_dense();
        assert_eq!(p.to_dense(), d);
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn permutation_detection() {
        assert!(SparseMatrix::from_column_map(&[2, 0, 1]).is_permutation());
        assert!(!SparseMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).is_permutation());
        assert!(!SparseMatrix::identity(3).scale(c(2.0)).is_permutation());
    }

    #[test]
    fn select_restricts_rows_and_columns() {
        let m = SparseMatrix::from_real_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        let s = m.select(&[1], &[2, 0]);
        assert_eq!(s.to_dense(), SparseMatrix::from_real_rows(&[vec![6.0, 4.0]]).to_dense());
    }
}
