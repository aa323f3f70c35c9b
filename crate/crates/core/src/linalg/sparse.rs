//! Compressed-sparse-row storage for complex matrices.
//!
//! Assembly goes through [`TripletBuilder`]; after `finish` the structure is
//! frozen: sorted unique column indices per row, no explicit zeros.

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Scalar};
use num_complex::Complex;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSparseMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<Cplx<T>>,
}

/// Accumulates (row, col, value) entries; duplicates are summed.
pub struct TripletBuilder<T> {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize, Cplx<T>)>,
}

impl<T: Scalar> TripletBuilder<T> {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        TripletBuilder { n_rows, n_cols, entries: Vec::new() }
    }

    pub fn push(&mut self, row: usize, col: usize, value: Cplx<T>) {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        self.entries.push((row, col, value));
    }

    pub fn finish(mut self) -> ComplexSparseMatrix<T> {
        self.entries.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_offsets = vec![0usize; self.n_rows + 1];
        let mut col_indices = Vec::new();
        let mut values: Vec<Cplx<T>> = Vec::new();
        let zero = Complex::new(T::zero(), T::zero());
        let mut it = self.entries.into_iter().peekable();
        for row in 0..self.n_rows {
            while let Some(&(r, c, _)) = it.peek() {
                if r != row {
                    break;
                }
                let mut acc = zero;
                while let Some(&(r2, c2, v)) = it.peek() {
                    if r2 == row && c2 == c {
                        acc += v;
                        it.next();
                    } else {
                        break;
                    }
                }
                if acc != zero {
                    col_indices.push(c);
                    values.push(acc);
                }
            }
            row_offsets[row + 1] = col_indices.len();
        }
        ComplexSparseMatrix { n_rows: self.n_rows, n_cols: self.n_cols, row_offsets, col_indices, values }
    }
}

impl<T: Scalar> ComplexSparseMatrix<T> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        ComplexSparseMatrix {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let one = Complex::new(T::one(), T::zero());
        ComplexSparseMatrix {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![one; n],
        }
    }

    pub fn from_parts(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<Cplx<T>>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1
            || row_offsets[n_rows] != col_indices.len()
            || col_indices.len() != values.len()
        {
            return Err(Error::invalid("inconsistent CSR arrays"));
        }
        for r in 0..n_rows {
            let s = &col_indices[row_offsets[r]..row_offsets[r + 1]];
            if s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&c| c >= n_cols) {
                return Err(Error::invalid("CSR columns not sorted unique"));
            }
        }
        Ok(ComplexSparseMatrix { n_rows, n_cols, row_offsets, col_indices, values })
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

    /// True when the matrix stores no entries at all.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[Cplx<T>]) {
        let lo = self.row_offsets[r];
        let hi = self.row_offsets[r + 1];
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Cplx<T>)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn get(&self, r: usize, c: usize) -> Cplx<T> {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => Complex::new(T::zero(), T::zero()),
        }
    }

    /// y = A x
    pub fn matvec(&self, x: &[Cplx<T>], y: &mut [Cplx<T>]) {
        debug_assert_eq!(x.len(), self.n_cols);
        debug_assert_eq!(y.len(), self.n_rows);
        let zero = Complex::new(T::zero(), T::zero());
        for r in 0..self.n_rows {
            let mut acc = zero;
            let lo = self.row_offsets[r];
            let hi = self.row_offsets[r + 1];
            for k in lo..hi {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            y[r] = acc;
        }
    }

    /// y += alpha * A x
    pub fn matvec_acc(&self, alpha: Cplx<T>, x: &[Cplx<T>], y: &mut [Cplx<T>]) {
        let zero = Complex::new(T::zero(), T::zero());
        for r in 0..self.n_rows {
            let mut acc = zero;
            for k in self.row_offsets[r]..self.row_offsets[r + 1] {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            y[r] += alpha * acc;
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.values
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn scaled(&self, alpha: Cplx<T>) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= alpha;
        }
        out
    }

    /// Linear combination of same-shape matrices (pattern union).
    pub fn linear_combination(terms: &[(Cplx<T>, &ComplexSparseMatrix<T>)]) -> Self {
        assert!(!terms.is_empty());
        let n_rows = terms[0].1.n_rows;
        let n_cols = terms[0].1.n_cols;
        let mut b = TripletBuilder::new(n_rows, n_cols);
        for &(alpha, m) in terms {
            assert_eq!(m.n_rows, n_rows);
            assert_eq!(m.n_cols, n_cols);
            for (r, c, v) in m.iter() {
                b.push(r, c, alpha * v);
            }
        }
        b.finish()
    }

    pub fn to_dense(&self) -> Vec<Vec<Cplx<T>>> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = vec![vec![zero; self.n_cols]; self.n_rows];
        for (r, c, v) in self.iter() {
            out[r][c] = v;
        }
        out
    }

    /// Max entrywise difference |self - other| over the union pattern.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for (r, c, v) in self.iter() {
            m = m.max((v - other.get(r, c)).norm());
        }
        for (r, c, v) in other.iter() {
            m = m.max((v - self.get(r, c)).norm());
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn builder_sums_duplicates_and_drops_zeros() {
        let mut b = TripletBuilder::<f64>::new(2, 2);
        b.push(0, 0, c(1.0, 0.0));
        b.push(0, 0, c(2.0, 0.0));
        b.push(1, 0, c(1.0, 0.0));
        b.push(1, 0, c(-1.0, 0.0));
        b.push(1, 1, c(0.0, 3.0));
        let m = b.finish();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 0), c(3.0, 0.0));
        assert_eq!(m.get(1, 0), c(0.0, 0.0));
        assert_eq!(m.get(1, 1), c(0.0, 3.0));
    }

    #[test]
    fn matvec_matches_dense() {
        let mut b = TripletBuilder::<f64>::new(3, 3);
        b.push(0, 0, c(2.0, 1.0));
        b.push(0, 2, c(-1.0, 0.0));
        b.push(1, 1, c(0.0, 1.0));
        b.push(2, 0, c(1.0, -1.0));
        let m = b.finish();
        let x = vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 2.0)];
        let mut y = vec![c(0.0, 0.0); 3];
        m.matvec(&x, &mut y);
        assert_eq!(y[0], c(2.0, 1.0) * x[0] - x[2]);
        assert_eq!(y[1], c(0.0, 1.0) * x[1]);
        assert_eq!(y[2], c(1.0, -1.0) * x[0]);
    }

    #[test]
    fn combination_unions_patterns() {
        let a = ComplexSparseMatrix::<f64>::identity(3);
        let mut b = TripletBuilder::<f64>::new(3, 3);
        b.push(0, 1, c(5.0, 0.0));
        let m = b.finish();
        let s = ComplexSparseMatrix::linear_combination(&[(c(2.0, 0.0), &a), (c(1.0, 0.0), &m)]);
        assert_eq!(s.get(0, 0), c(2.0, 0.0));
        assert_eq!(s.get(0, 1), c(5.0, 0.0));
        assert_eq!(s.nnz(), 4);
    }
}
