//! Dense complex kernels: LU with partial pivoting, Hessenberg reduction,
//! Schur decomposition by shifted QR, triangular eigenvectors and Schur
//! reordering. Used for the small projected problems inside the Krylov
//! solvers and for the desk-scale reference eigensolves.

use crate::error::{Error, Result};
use crate::scalar::{real, Cplx, Scalar};
use num_complex::Complex;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    data: Vec<Cplx<T>>, // row-major
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseMatrix { n_rows, n_cols, data: vec![Complex::new(T::zero(), T::zero()); n_rows * n_cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Cplx<T>>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows[0].len();
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols);
            data.extend_from_slice(r);
        }
        DenseMatrix { n_rows, n_cols, data }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn matvec(&self, x: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let mut y = vec![Complex::new(T::zero(), T::zero()); self.n_rows];
        for i in 0..self.n_rows {
            let row = &self.data[i * self.n_cols..(i + 1) * self.n_cols];
            let mut acc = Complex::new(T::zero(), T::zero());
            for (a, b) in row.iter().zip(x) {
                acc += *a * *b;
            }
            y[i] = acc;
        }
        y
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n_cols, other.n_rows);
        let mut out = Self::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a == Complex::new(T::zero(), T::zero()) {
                    continue;
                }
                for j in 0..other.n_cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), |a, b| a.max(b))
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = Cplx<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Cplx<T> {
        &self.data[r * self.n_cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Cplx<T> {
        &mut self.data[r * self.n_cols + c]
    }
}

// ---------------------------------------------------------------- dense LU

pub struct DenseLu<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
    swaps: usize,
}

impl<T: Scalar> DenseLu<T> {
    pub fn factor(a: &DenseMatrix<T>) -> Result<Self> {
        assert_eq!(a.n_rows, a.n_cols);
        let n = a.n_rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0usize;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let m = lu[(i, k)].norm();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best == T::zero() {
                return Err(Error::SingularMatrix { row: perm[k] });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f != Complex::new(T::zero(), T::zero()) {
                    for j in k + 1..n {
                        let v = lu[(k, j)];
                        lu[(i, j)] -= f * v;
                    }
                }
            }
        }
        Ok(DenseLu { lu, perm, swaps })
    }

    pub fn solve(&self, b: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let n = self.lu.n_rows;
        let mut x: Vec<Cplx<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    /// (phase, log|det|): det = phase * exp(log_abs); |phase| = 1.
    pub fn slogdet(&self) -> (Cplx<T>, T) {
        let n = self.lu.n_rows;
        let mut log_abs = T::zero();
        let mut phase = Complex::new(T::one(), T::zero());
        if self.swaps % 2 == 1 {
            phase = -phase;
        }
        for i in 0..n {
            let d = self.lu[(i, i)];
            let m = d.norm();
            log_abs += m.ln();
            phase *= d / Complex::new(m, T::zero());
        }
        (phase, log_abs)
    }
}

// ----------------------------------------------------- Givens and Householder

/// LAPACK-style complex Givens: returns (c, s, r) with c real such that
/// [c s; -conj(s) c] [a; b] = [r; 0].
fn givens<T: Scalar>(a: Cplx<T>, b: Cplx<T>) -> (T, Cplx<T>, Cplx<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    if b == zero {
        return (T::one(), zero, a);
    }
    if a == zero {
        let s = b.conj() / Complex::new(b.norm(), T::zero());
        return (T::zero(), s, Complex::new(b.norm(), T::zero()));
    }
    let na = a.norm();
    let h = (na * na + b.norm_sqr()).sqrt();
    let c = na / h;
    let u = a / Complex::new(na, T::zero());
    let s = u * b.conj() / Complex::new(h, T::zero());
    (c, s, u * Complex::new(h, T::zero()))
}

struct Rot<T> {
    c: T,
    s: Cplx<T>,
}

impl<T: Scalar> Rot<T> {
    /// rows k,k+1 <- rot * rows, over columns [j0, j1).
    fn apply_left(&self, m: &mut DenseMatrix<T>, k: usize, j0: usize, j1: usize) {
        for j in j0..j1 {
            let a = m[(k, j)];
            let b = m[(k + 1, j)];
            m[(k, j)] = a * Complex::new(self.c, T::zero()) + self.s * b;
            m[(k + 1, j)] = b * Complex::new(self.c, T::zero()) - self.s.conj() * a;
        }
    }

    /// cols k,k+1 <- cols * rot^H, over rows [i0, i1).
    fn apply_right(&self, m: &mut DenseMatrix<T>, k: usize, i0: usize, i1: usize) {
        for i in i0..i1 {
            let a = m[(i, k)];
            let b = m[(i, k + 1)];
            m[(i, k)] = a * Complex::new(self.c, T::zero()) + self.s.conj() * b;
            m[(i, k + 1)] = b * Complex::new(self.c, T::zero()) - self.s * a;
        }
    }
}

// ------------------------------------------------------------ Hessenberg

/// Unitary reduction A = Q H Q^H with H upper Hessenberg.
pub fn hessenberg<T: Scalar>(a: &DenseMatrix<T>) -> (DenseMatrix<T>, DenseMatrix<T>) {
    let n = a.n_rows;
    let mut h = a.clone();
    let mut q = DenseMatrix::identity(n);
    let zero = Complex::new(T::zero(), T::zero());
    for k in 0..n.saturating_sub(2) {
        // Householder on h[k+1.., k]
        let mut x: Vec<Cplx<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let alpha = if x[0] == zero {
            Complex::new(xnorm, T::zero())
        } else {
            x[0] / Complex::new(x[0].norm(), T::zero()) * Complex::new(xnorm, T::zero())
        };
        x[0] += alpha;
        let vnorm2 = x.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b);
        if vnorm2 == T::zero() {
            continue;
        }
        let beta = real::<T>(2.0) / vnorm2;
        // left: h <- (I - beta v v^H) h  on rows k+1.., cols k..
        for j in k..n {
            let mut dot = zero;
            for (vi, i) in x.iter().zip(k + 1..n) {
                dot += vi.conj() * h[(i, j)];
            }
            let f = dot * Complex::new(beta, T::zero());
            for (vi, i) in x.iter().zip(k + 1..n) {
                h[(i, j)] = h[(i, j)] - *vi * f;
            }
        }
        // right: h <- h (I - beta v v^H) on cols k+1.., all rows
        for i in 0..n {
            let mut dot = zero;
            for (vj, j) in x.iter().zip(k + 1..n) {
                dot += h[(i, j)] * *vj;
            }
            let f = dot * Complex::new(beta, T::zero());
            for (vj, j) in x.iter().zip(k + 1..n) {
                h[(i, j)] = h[(i, j)] - f * vj.conj();
            }
        }
        // accumulate q <- q (I - beta v v^H)
        for i in 0..n {
            let mut dot = zero;
            for (vj, j) in x.iter().zip(k + 1..n) {
                dot += q[(i, j)] * *vj;
            }
            let f = dot * Complex::new(beta, T::zero());
            for (vj, j) in x.iter().zip(k + 1..n) {
                q[(i, j)] = q[(i, j)] - f * vj.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = zero;
        }
    }
    (h, q)
}

// ------------------------------------------------------------------ Schur

fn wilkinson_shift<T: Scalar>(h: &DenseMatrix<T>, hi: usize) -> Cplx<T> {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half = real::<T>(0.5);
    let tr2 = (a + d) * Complex::new(half, T::zero());
    let det = a * d - b * c;
    let disc = (tr2 * tr2 - det).sqrt();
    let e1 = tr2 + disc;
    let e2 = tr2 - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Schur decomposition of an upper-Hessenberg matrix: returns triangular T
/// with A = Q T Q^H, Q accumulated onto the passed basis.
pub fn schur_from_hessenberg<T: Scalar>(
    mut h: DenseMatrix<T>,
    mut q: DenseMatrix<T>,
) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    let n = h.n_rows;
    if n == 0 {
        return Ok((h, q));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iters_here = 0usize;
    let mut total = 0usize;
    let max_total = 40 * n.max(10);
    loop {
        // deflate small subdiagonals
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == T::zero() { T::one() } else { s };
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            if hi == 0 {
                break;
            }
            hi -= 1;
            iters_here = 0;
            continue;
        }
        total += 1;
        iters_here += 1;
        if total > max_total {
            return Err(Error::NoConvergence("QR iteration stalled".into()));
        }
        let mu = if iters_here % 12 == 0 {
            // exceptional shift
            let m = h[(hi, hi - 1)].norm() + if hi >= 2 { h[(hi - 1, hi - 2)].norm() } else { T::zero() };
            h[(hi, hi)] + Complex::new(m, T::zero())
        } else {
            wilkinson_shift(&h, hi)
        };
        // implicit single-shift bulge chase on [lo, hi]
        let mut x = h[(lo, lo)] - mu;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s, _) = givens(x, y);
            let rot = Rot { c, s };
            let j0 = k.saturating_sub(1).max(lo);
            rot.apply_left(&mut h, k, j0, n);
            let i1 = (k + 3).min(hi + 1);
            rot.apply_right(&mut h, k, 0, i1);
            rot.apply_right(&mut q, k, 0, n);
            if k > lo {
                h[(k + 1, k - 1)] = zero;
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    Ok((h, q))
}

/// Full eigen-decomposition of a general dense complex matrix.
/// Returns (eigenvalues, eigenvectors as columns), vectors normalized to unit 2-norm.
pub fn eig<T: Scalar>(a: &DenseMatrix<T>) -> Result<(Vec<Cplx<T>>, DenseMatrix<T>)> {
    let n = a.n_rows;
    let (h, q) = hessenberg(a);
    let (t, q) = schur_from_hessenberg(h, q)?;
    let values: Vec<Cplx<T>> = (0..n).map(|i| t[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    let scale = t.max_abs().max(T::epsilon());
    for k in 0..n {
        let lam = values[k];
        let mut v = vec![Complex::new(T::zero(), T::zero()); n];
        v[k] = Complex::new(T::one(), T::zero());
        for i in (0..k).rev() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in i + 1..=k {
                acc += t[(i, j)] * v[j];
            }
            let mut d = t[(i, i)] - lam;
            if d.norm() < T::epsilon() * scale {
                d = Complex::new(T::epsilon() * scale, T::zero());
            }
            v[i] = -acc / d;
        }
        // back to original basis
        let mut w = vec![Complex::new(T::zero(), T::zero()); n];
        for i in 0..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 0..=k {
                acc += q[(i, j)] * v[j];
            }
            w[i] = acc;
        }
        let nrm = w.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
        for (i, wi) in w.into_iter().enumerate() {
            vectors[(i, k)] = wi / Complex::new(nrm, T::zero());
        }
    }
    Ok((values, vectors))
}

/// Eigenvalues only.
pub fn eigenvalues<T: Scalar>(a: &DenseMatrix<T>) -> Result<Vec<Cplx<T>>> {
    let n = a.n_rows;
    let (h, q) = hessenberg(a);
    let (t, _) = schur_from_hessenberg(h, q)?;
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Swap the diagonal entries at positions (j, j+1) of a triangular T by a
/// unitary similarity, updating Q alongside.
fn swap_schur<T: Scalar>(t: &mut DenseMatrix<T>, q: &mut DenseMatrix<T>, j: usize) {
    let n = t.n_rows;
    let a = t[(j, j)];
    let b = t[(j, j + 1)];
    let d = t[(j + 1, j + 1)];
    // eigenvector of [[a, b],[0, d]] for eigenvalue d is [b, d - a]
    let (c, s, _) = givens(b, d - a);
    let rot = Rot { c, s };
    rot.apply_left(t, j, 0, n);
    rot.apply_right(t, j, 0, n);
    rot.apply_right(q, j, 0, n);
    t[(j + 1, j)] = Complex::new(T::zero(), T::zero());
}

/// Reorder the Schur form so the positions in `select` (indices into the
/// current diagonal) appear first, preserving their relative order.
pub fn reorder_schur<T: Scalar>(
    t: &mut DenseMatrix<T>,
    q: &mut DenseMatrix<T>,
    select: &[usize],
) {
    let mut sel: Vec<usize> = select.to_vec();
    sel.sort_unstable();
    for (target, &pos) in sel.iter().enumerate() {
        let mut p = pos;
        while p > target {
            swap_schur(t, q, p - 1);
            p -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn rng_mat(n: usize, seed: u64) -> DenseMatrix<f64> {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = Complex64::new(next(), next());
            }
        }
        m
    }

    #[test]
    fn lu_solves() {
        let a = rng_mat(12, 3);
        let lu = DenseLu::factor(&a).unwrap();
        let b: Vec<Complex64> = (0..12).map(|i| Complex64::new(i as f64, -1.0)).collect();
        let x = lu.solve(&b);
        let r = a.matvec(&x);
        let err: f64 = r.iter().zip(&b).map(|(u, v)| (u - v).norm()).sum();
        assert!(err < 1e-10, "residual {err}");
    }

    #[test]
    fn slogdet_matches_2x2() {
        let mut a = DenseMatrix::zeros(2, 2);
        a[(0, 0)] = Complex64::new(2.0, 0.0);
        a[(0, 1)] = Complex64::new(1.0, 0.0);
        a[(1, 0)] = Complex64::new(0.0, 1.0);
        a[(1, 1)] = Complex64::new(3.0, 0.0);
        // det = 6 - i
        let lu = DenseLu::factor(&a).unwrap();
        let (phase, log_abs) = lu.slogdet();
        let det = phase * log_abs.exp();
        assert!((det - Complex64::new(6.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn hessenberg_is_similar() {
        let a = rng_mat(10, 7);
        let (h, q) = hessenberg(&a);
        for i in 0..10usize {
            for j in 0..i.saturating_sub(1) {
                assert!(h[(i, j)].norm() < 1e-13);
            }
        }
        // check A Q = Q H
        let aq = a.matmul(&q);
        let qh = q.matmul(&h);
        let mut diff: f64 = 0.0;
        for i in 0..10 {
            for j in 0..10 {
                diff = diff.max((aq[(i, j)] - qh[(i, j)]).norm());
            }
        }
        assert!(diff < 1e-12, "similarity defect {diff}");
    }

    #[test]
    fn eig_residuals_small() {
        let a = rng_mat(16, 11);
        let (vals, vecs) = eig(&a).unwrap();
        for k in 0..16 {
            let v: Vec<Complex64> = (0..16).map(|i| vecs[(i, k)]).collect();
            let av = a.matvec(&v);
            let mut res: f64 = 0.0;
            for i in 0..16 {
                res = res.max((av[i] - vals[k] * v[i]).norm());
            }
            assert!(res < 1e-9 * a.frobenius_norm(), "eigpair {k} residual {res}");
        }
    }

    #[test]
    fn reorder_moves_selected_first() {
        let a = rng_mat(8, 23);
        let (h, q) = hessenberg(&a);
        let (mut t, mut q) = schur_from_hessenberg(h, q).unwrap();
        let orig: Vec<Complex64> = (0..8).map(|i| t[(i, i)]).collect();
        reorder_schur(&mut t, &mut q, &[3, 6]);
        let d0 = t[(0, 0)];
        let d1 = t[(1, 1)];
        assert!((d0 - orig[3]).norm() < 1e-8 * orig[3].norm());
        assert!((d1 - orig[6]).norm() < 1e-8 * orig[6].norm());
        // similarity preserved: A Q = Q T
        let aq = a.matmul(&q);
        let qt = q.matmul(&t);
        let mut diff: f64 = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                diff = diff.max((aq[(i, j)] - qt[(i, j)]).norm());
            }
        }
        assert!(diff < 1e-11, "similarity defect {diff}");
    }
}
