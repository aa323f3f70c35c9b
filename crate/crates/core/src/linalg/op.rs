//! Operator contract shared by explicit matrices, matrix-free wave
//! operators and shifted/preconditioned combinations.

use crate::linalg::sparse::ComplexSparseMatrix;
use crate::scalar::{Cplx, Scalar};

pub trait LinOp<T: Scalar> {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Cplx<T>], y: &mut [Cplx<T>]);

    fn apply_vec(&self, x: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let mut y = vec![Cplx::new(T::zero(), T::zero()); self.dim()];
        self.apply(x, &mut y);
        y
    }
}

impl<T: Scalar> LinOp<T> for ComplexSparseMatrix<T> {
    fn dim(&self) -> usize {
        self.n_rows()
    }
    fn apply(&self, x: &[Cplx<T>], y: &mut [Cplx<T>]) {
        self.matvec(x, y);
    }
}

impl<T: Scalar, O: LinOp<T> + ?Sized> LinOp<T> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &[Cplx<T>], y: &mut [Cplx<T>]) {
        (**self).apply(x, y)
    }
}

/// Operator from a closure.
pub struct FnOp<F> {
    n: usize,
    f: F,
}

impl<F> FnOp<F> {
    pub fn new(n: usize, f: F) -> Self {
        FnOp { n, f }
    }
}

impl<T: Scalar, F: Fn(&[Cplx<T>], &mut [Cplx<T>])> LinOp<T> for FnOp<F> {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[Cplx<T>], y: &mut [Cplx<T>]) {
        (self.f)(x, y)
    }
}

/// Linear combination sum_i alpha_i M_i applied term by term.
pub struct CombinedOp<'a, T> {
    n: usize,
    terms: Vec<(Cplx<T>, &'a dyn LinOp<T>)>,
}

impl<'a, T: Scalar> CombinedOp<'a, T> {
    pub fn new(n: usize, terms: Vec<(Cplx<T>, &'a dyn LinOp<T>)>) -> Self {
        CombinedOp { n, terms }
    }
}

impl<'a, T: Scalar> LinOp<T> for CombinedOp<'a, T> {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[Cplx<T>], y: &mut [Cplx<T>]) {
        let zero = Cplx::new(T::zero(), T::zero());
        y.fill(zero);
        let mut tmp = vec![zero; self.n];
        for (alpha, op) in &self.terms {
            op.apply(x, &mut tmp);
            for (yi, ti) in y.iter_mut().zip(&tmp) {
                *yi += *alpha * *ti;
            }
        }
    }
}
