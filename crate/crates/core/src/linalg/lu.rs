//! Sparse LU factorization with partial pivoting (left-looking
//! Gilbert-Peierls with a threshold preference for the diagonal), plus a
//! dense fallback for small or nearly dense matrices. Column ordering is a
//! recursive BFS-bisection dissection of the pattern graph.

use crate::error::{Error, Result};
use crate::linalg::dense::{DenseLu, DenseMatrix};
use crate::linalg::sparse::ComplexSparseMatrix;
use crate::scalar::{real, Cplx, Scalar};
use num_complex::Complex;

/// Opaque LU factorization handle; `solve` reuses it for many right-hand sides.
pub enum FactorHandle<T> {
    Dense(Box<DenseLuFactor<T>>),
    Sparse(Box<SparseLu<T>>),
}

pub struct DenseLuFactor<T> {
    lu: DenseLu<T>,
    n: usize,
}

/// Relative diagonal preference for threshold pivoting.
const PIVOT_THRESHOLD: f64 = 0.1;
/// Below this size, or above this density, factor densely.
const DENSE_SIZE_CAP: usize = 2000;
const DENSE_DENSITY: f64 = 0.05;

/// Factor a square structurally nonsingular matrix. P M Q = L U.
pub fn lu_factor<T: Scalar>(m: &ComplexSparseMatrix<T>) -> Result<FactorHandle<T>> {
    let n = m.n_rows();
    assert_eq!(n, m.n_cols(), "lu_factor requires a square matrix");
    let density = m.nnz() as f64 / (n as f64 * n as f64);
    if n <= 64 || (n <= DENSE_SIZE_CAP && density > DENSE_DENSITY) {
        let mut dm = DenseMatrix::zeros(n, n);
        for (r, c, v) in m.iter() {
            dm[(r, c)] = v;
        }
        let lu = DenseLu::factor(&dm)?;
        return Ok(FactorHandle::Dense(Box::new(DenseLuFactor { lu, n })));
    }
    Ok(FactorHandle::Sparse(Box::new(SparseLu::factor(m)?)))
}

impl<T: Scalar> FactorHandle<T> {
    pub fn n(&self) -> usize {
        match self {
            FactorHandle::Dense(d) => d.n,
            FactorHandle::Sparse(s) => s.n,
        }
    }

    /// Entries stored in the factors (memory diagnostics).
    pub fn fill_nnz(&self) -> usize {
        match self {
            FactorHandle::Dense(d) => d.n * d.n,
            FactorHandle::Sparse(s) => s.l_rows.len() + s.u_rows.len() + s.n,
        }
    }

    pub fn solve(&self, b: &[Cplx<T>]) -> Vec<Cplx<T>> {
        match self {
            FactorHandle::Dense(d) => d.lu.solve(b),
            FactorHandle::Sparse(s) => s.solve(b),
        }
    }

    pub fn solve_into(&self, b: &[Cplx<T>], out: &mut Vec<Cplx<T>>) {
        *out = self.solve(b);
    }
}

// -------------------------------------------------------------- ordering

/// Recursive BFS-bisection fill-reducing ordering of the symmetrized pattern.
/// Returns `order` with `order[k]` = original index eliminated at step k.
pub fn dissection_order<T: Scalar>(m: &ComplexSparseMatrix<T>) -> Vec<usize> {
    let n = m.n_rows();
    // symmetrized adjacency
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (r, c, _) in m.iter() {
        if r != c {
            adj[r].push(c as u32);
            adj[c].push(r as u32);
        }
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    let mut order = Vec::with_capacity(n);
    let mut in_set = vec![u32::MAX; n];
    let all: Vec<u32> = (0..n as u32).collect();
    let mut epoch = 0u32;
    dissect(&adj, &all, &mut order, &mut in_set, &mut epoch);
    debug_assert_eq!(order.len(), n);
    order
}

fn dissect(
    adj: &[Vec<u32>],
    nodes: &[u32],
    out: &mut Vec<usize>,
    in_set: &mut [u32],
    epoch: &mut u32,
) {
    const LEAF: usize = 32;
    if nodes.len() <= LEAF {
        out.extend(nodes.iter().map(|&v| v as usize));
        return;
    }
    *epoch += 1;
    let tag = *epoch;
    for &v in nodes {
        in_set[v as usize] = tag;
    }
    // two BFS sweeps for a pseudo-peripheral start
    let (levels, reached) = bfs_levels(adj, nodes[0], tag, in_set, nodes.len());
    if reached < nodes.len() {
        // disconnected: recurse on the component and the rest separately
        let mut comp = Vec::with_capacity(reached);
        let mut rest = Vec::with_capacity(nodes.len() - reached);
        for &v in nodes {
            if levels[v as usize] != u32::MAX {
                comp.push(v);
            } else {
                rest.push(v);
            }
        }
        dissect(adj, &comp, out, in_set, epoch);
        dissect(adj, &rest, out, in_set, epoch);
        return;
    }
    let far = nodes
        .iter()
        .copied()
        .max_by_key(|&v| levels[v as usize])
        .unwrap();
    let (levels, _) = bfs_levels(adj, far, tag, in_set, nodes.len());
    let max_level = nodes.iter().map(|&v| levels[v as usize]).max().unwrap();
    if max_level < 2 {
        out.extend(nodes.iter().map(|&v| v as usize));
        return;
    }
    // split at the level closest to the median node
    let mut counts = vec![0usize; max_level as usize + 1];
    for &v in nodes {
        counts[levels[v as usize] as usize] += 1;
    }
    let half = nodes.len() / 2;
    let mut acc = 0usize;
    let mut split = 1u32;
    for (l, &c) in counts.iter().enumerate() {
        acc += c;
        if acc >= half {
            split = (l as u32).clamp(1, max_level - 1);
            break;
        }
    }
    let mut left = Vec::new();
    let mut sep = Vec::new();
    let mut right = Vec::new();
    for &v in nodes {
        let l = levels[v as usize];
        if l < split {
            left.push(v);
        } else if l == split {
            sep.push(v);
        } else {
            right.push(v);
        }
    }
    if left.is_empty() || right.is_empty() {
        out.extend(nodes.iter().map(|&v| v as usize));
        return;
    }
    dissect(adj, &left, out, in_set, epoch);
    dissect(adj, &right, out, in_set, epoch);
    out.extend(sep.iter().map(|&v| v as usize));
}

fn bfs_levels(
    adj: &[Vec<u32>],
    start: u32,
    tag: u32,
    in_set: &[u32],
    cap: usize,
) -> (Vec<u32>, usize) {
    let mut levels = vec![u32::MAX; adj.len()];
    let mut queue = std::collections::VecDeque::with_capacity(cap);
    levels[start as usize] = 0;
    queue.push_back(start);
    let mut reached = 0usize;
    while let Some(v) = queue.pop_front() {
        reached += 1;
        let lv = levels[v as usize];
        for &w in &adj[v as usize] {
            if in_set[w as usize] == tag && levels[w as usize] == u32::MAX {
                levels[w as usize] = lv + 1;
                queue.push_back(w);
            }
        }
    }
    (levels, reached)
}

// ----------------------------------------------------------- sparse factor

pub struct SparseLu<T> {
    n: usize,
    // L in factor row coordinates, unit diagonal implicit, flattened CSC
    l_ptr: Vec<usize>,
    l_rows: Vec<u32>,
    l_vals: Vec<Cplx<T>>,
    // U strictly upper part in factor coordinates, flattened CSC
    u_ptr: Vec<usize>,
    u_rows: Vec<u32>,
    u_vals: Vec<Cplx<T>>,
    u_diag: Vec<Cplx<T>>,
    pinv: Vec<usize>, // original row -> factor row
    q: Vec<usize>,    // factor column k -> original column
}

impl<T: Scalar> SparseLu<T> {
    pub fn factor(m: &ComplexSparseMatrix<T>) -> Result<Self> {
        let n = m.n_rows();
        let q = dissection_order(m);
        // CSC of m
        let mut col_counts = vec![0usize; n];
        for (_, c, _) in m.iter() {
            col_counts[c] += 1;
        }
        let mut col_ptr = vec![0usize; n + 1];
        for i in 0..n {
            col_ptr[i + 1] = col_ptr[i] + col_counts[i];
        }
        let mut a_rows = vec![0u32; m.nnz()];
        let mut a_vals = vec![Complex::new(T::zero(), T::zero()); m.nnz()];
        let mut fill = col_ptr.clone();
        for (r, c, v) in m.iter() {
            a_rows[fill[c]] = r as u32;
            a_vals[fill[c]] = v;
            fill[c] += 1;
        }

        const NONE: usize = usize::MAX;
        let mut pinv = vec![NONE; n];
        let mut l_cols: Vec<Vec<(u32, Cplx<T>)>> = Vec::with_capacity(n);
        let mut u_cols: Vec<Vec<(u32, Cplx<T>)>> = Vec::with_capacity(n);
        let mut u_diag = Vec::with_capacity(n);
        let zero = Complex::new(T::zero(), T::zero());
        let mut x = vec![zero; n];
        let mut mark = vec![u32::MAX; n];
        let mut stack: Vec<(u32, usize)> = Vec::new();
        let mut topo: Vec<u32> = Vec::with_capacity(n);
        let threshold = real::<T>(PIVOT_THRESHOLD);

        for k in 0..n {
            let col = q[k];
            let tag = k as u32;
            // symbolic: reach of A(:,col) through already-built L columns
            topo.clear();
            for idx in col_ptr[col]..col_ptr[col + 1] {
                let i = a_rows[idx] as usize;
                if mark[i] != tag {
                    dfs_reach(i, tag, &mut mark, &mut stack, &mut topo, &l_cols, &pinv);
                }
            }
            // numeric: x = A(:,col); eliminate in topological order
            for &i in topo.iter() {
                x[i as usize] = zero;
            }
            for idx in col_ptr[col]..col_ptr[col + 1] {
                x[a_rows[idx] as usize] = a_vals[idx];
            }
            for &iu in topo.iter().rev() {
                let i = iu as usize;
                let fk = pinv[i];
                if fk == NONE {
                    continue;
                }
                let xi = x[i];
                if xi == zero {
                    continue;
                }
                for &(r, v) in &l_cols[fk] {
                    x[r as usize] -= v * xi;
                }
            }
            // pivot among rows not yet pivotal
            let mut max_abs = T::zero();
            let mut piv_row = NONE;
            let mut diag_abs = T::zero();
            for &iu in topo.iter() {
                let i = iu as usize;
                if pinv[i] != NONE {
                    continue;
                }
                let a = x[i].norm();
                if a > max_abs {
                    max_abs = a;
                    piv_row = i;
                }
                if i == col {
                    diag_abs = a;
                }
            }
            if piv_row == NONE || max_abs == T::zero() {
                return Err(Error::SingularMatrix { row: col });
            }
            if diag_abs >= threshold * max_abs {
                piv_row = col;
            }
            let piv = x[piv_row];
            // gather U (factor rows) and L (original rows, scaled)
            let mut ucol = Vec::new();
            let mut lcol = Vec::new();
            for &iu in topo.iter() {
                let i = iu as usize;
                let xi = x[i];
                if xi == zero {
                    continue;
                }
                match pinv[i] {
                    NONE => {
                        if i != piv_row {
                            lcol.push((i as u32, xi / piv));
                        }
                    }
                    fk => ucol.push((fk as u32, xi)),
                }
            }
            ucol.sort_unstable_by_key(|e| e.0);
            u_diag.push(piv);
            u_cols.push(ucol);
            l_cols.push(lcol);
            pinv[piv_row] = k;
        }

        // remap L row indices into factor coordinates and flatten
        let mut l_ptr = vec![0usize; n + 1];
        let mut u_ptr = vec![0usize; n + 1];
        for k in 0..n {
            l_ptr[k + 1] = l_ptr[k] + l_cols[k].len();
            u_ptr[k + 1] = u_ptr[k] + u_cols[k].len();
        }
        let mut l_rows = Vec::with_capacity(l_ptr[n]);
        let mut l_vals = Vec::with_capacity(l_ptr[n]);
        for lcol in &l_cols {
            for &(r, v) in lcol {
                l_rows.push(pinv[r as usize] as u32);
                l_vals.push(v);
            }
        }
        let mut u_rows = Vec::with_capacity(u_ptr[n]);
        let mut u_vals = Vec::with_capacity(u_ptr[n]);
        for ucol in &u_cols {
            for &(r, v) in ucol {
                u_rows.push(r);
                u_vals.push(v);
            }
        }
        Ok(SparseLu { n, l_ptr, l_rows, l_vals, u_ptr, u_rows, u_vals, u_diag, pinv, q })
    }

    pub fn solve(&self, b: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let n = self.n;
        let zero = Complex::new(T::zero(), T::zero());
        let mut t = vec![zero; n];
        for i in 0..n {
            t[self.pinv[i]] = b[i];
        }
        // forward: L t = t (unit diagonal, column-oriented)
        for k in 0..n {
            let tk = t[k];
            if tk != zero {
                for idx in self.l_ptr[k]..self.l_ptr[k + 1] {
                    t[self.l_rows[idx] as usize] -= self.l_vals[idx] * tk;
                }
            }
        }
        // backward: U t = t (column-oriented, diagonal separate)
        for k in (0..n).rev() {
            let tk = t[k] / self.u_diag[k];
            t[k] = tk;
            if tk != zero {
                for idx in self.u_ptr[k]..self.u_ptr[k + 1] {
                    t[self.u_rows[idx] as usize] -= self.u_vals[idx] * tk;
                }
            }
        }
        let mut x = vec![zero; n];
        for k in 0..n {
            x[self.q[k]] = t[k];
        }
        x
    }
}

/// Depth-first reach used by the sparse triangular solve: follow edges of
/// already-pivotal L columns, push nodes in topological (post) order.
fn dfs_reach<T: Scalar>(
    start: usize,
    tag: u32,
    mark: &mut [u32],
    stack: &mut Vec<(u32, usize)>,
    topo: &mut Vec<u32>,
    l_cols: &[Vec<(u32, Cplx<T>)>],
    pinv: &[usize],
) {
    stack.clear();
    stack.push((start as u32, 0));
    mark[start] = tag;
    loop {
        let Some(&(node, pos)) = stack.last() else { break };
        let i = node as usize;
        let fk = pinv[i];
        let children: &[(u32, Cplx<T>)] = if fk == usize::MAX { &[] } else { &l_cols[fk] };
        let mut p = pos;
        let mut descended = false;
        while p < children.len() {
            let child = children[p].0 as usize;
            p += 1;
            if mark[child] != tag {
                mark[child] = tag;
                stack.last_mut().unwrap().1 = p;
                stack.push((child as u32, 0));
                descended = true;
                break;
            }
        }
        if !descended {
            topo.push(node);
            stack.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sparse::TripletBuilder;
    use num_complex::Complex64;

    fn laplacian_dirichlet(n: usize) -> ComplexSparseMatrix<f64> {
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            b.push(i, i, Complex64::new(-2.0, 0.0));
            if i > 0 {
                b.push(i, i - 1, Complex64::new(1.0, 0.0));
            }
            if i + 1 < n {
                b.push(i, i + 1, Complex64::new(1.0, 0.0));
            }
        }
        b.finish()
    }

    #[test]
    fn identity_solves_return_b() {
        let m = ComplexSparseMatrix::<f64>::identity(10);
        let f = lu_factor(&m).unwrap();
        let b: Vec<Complex64> = (0..10).map(|i| Complex64::new(i as f64, 1.0)).collect();
        assert_eq!(f.solve(&b), b);
    }

    #[test]
    fn dirichlet_laplacian_solve_matches_dense() {
        let m = laplacian_dirichlet(16);
        let f = lu_factor(&m).unwrap();
        let b: Vec<Complex64> = (0..16).map(|i| Complex64::new((i as f64).sin(), 0.5)).collect();
        let x = f.solve(&b);
        let mut r = vec![Complex64::new(0.0, 0.0); 16];
        m.matvec(&x, &mut r);
        let err: f64 = r.iter().zip(&b).map(|(u, v)| (u - v).norm()).sum();
        assert!(err < 1e-12, "residual {err}");
    }

    #[test]
    fn sparse_path_random_pattern() {
        // big enough to avoid the dense fallback
        let n = 3000;
        let mut b = TripletBuilder::new(n, n);
        let mut state = 0x12345u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for i in 0..n {
            b.push(i, i, Complex64::new(4.0, 1.0));
            for _ in 0..3 {
                let j = (next() % n as u64) as usize;
                if j != i {
                    b.push(i, j, Complex64::new(((next() % 100) as f64) / 100.0 - 0.5, 0.1));
                }
            }
        }
        let m = b.finish();
        let f = lu_factor(&m).unwrap();
        assert!(matches!(f, FactorHandle::Sparse(_)));
        let rhs: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + (i % 7) as f64, -0.3)).collect();
        let x = f.solve(&rhs);
        let mut r = vec![Complex64::new(0.0, 0.0); n];
        m.matvec(&x, &mut r);
        let bn: f64 = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let rn: f64 = r
            .iter()
            .zip(&rhs)
            .map(|(u, v)| (u - v).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(rn <= 1e-10 * bn, "relative residual {}", rn / bn);
    }

    #[test]
    fn singular_matrix_reports_row() {
        // all-reflecting 1D wave pattern: rows sum to zero exactly
        let n = 12;
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            let mut diag = 0.0;
            if i > 0 {
                b.push(i, i - 1, Complex64::new(1.0, 0.0));
                diag -= 1.0;
            }
            if i + 1 < n {
                b.push(i, i + 1, Complex64::new(1.0, 0.0));
                diag -= 1.0;
            }
            b.push(i, i, Complex64::new(diag, 0.0));
        }
        let m = b.finish();
        match lu_factor(&m) {
            Err(Error::SingularMatrix { .. }) => {}
            other => panic!("expected singular-matrix error, got {:?}", other.is_ok()),
        }
    }
}
