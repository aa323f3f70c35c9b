//! Iterated classical Gram-Schmidt with the DGKS reorthogonalization test.
//! All Krylov paths expand their bases through this routine.

use crate::scalar::{real, vec_axpy, vec_dot, vec_norm, Cplx, Scalar};

/// Result of orthogonalizing a vector against an orthonormal set.
pub struct OrthoResult<T> {
    /// Projection coefficients h = V^H w (including any second pass).
    pub coefficients: Vec<Cplx<T>>,
    /// Norm of the remainder before normalization.
    pub norm: T,
    /// True when the remainder is numerically zero: w was in span(V).
    pub breakdown: bool,
}

/// Orthogonalize `w` in place against the columns in `basis`.
///
/// One classical Gram-Schmidt pass, repeated once more when the norm drops
/// by more than 1/sqrt(2) (DGKS criterion). Breakdown is signalled when the
/// remainder is below 1e-14 of the original norm; the caller restarts with
/// a fresh direction in that case.
pub fn icgs<T: Scalar, S: AsRef<[Cplx<T>]>>(basis: &[S], w: &mut [Cplx<T>]) -> OrthoResult<T> {
    let norm0 = vec_norm(w);
    let k = basis.len();
    let mut h = vec![Cplx::new(T::zero(), T::zero()); k];
    if k == 0 {
        let breakdown = norm0 == T::zero();
        if !breakdown {
            let inv = Cplx::new(T::one() / norm0, T::zero());
            for wi in w.iter_mut() {
                *wi *= inv;
            }
        }
        return OrthoResult { coefficients: h, norm: norm0, breakdown };
    }
    let pass = |w: &mut [Cplx<T>], h: &mut [Cplx<T>]| {
        for (j, v) in basis.iter().enumerate() {
            let c = vec_dot(v.as_ref(), w);
            vec_axpy(-c, v.as_ref(), w);
            h[j] += c;
        }
    };
    pass(w, &mut h);
    let mut norm1 = vec_norm(w);
    let inv_sqrt2 = real::<T>(std::f64::consts::FRAC_1_SQRT_2);
    if norm1 < inv_sqrt2 * norm0 {
        pass(w, &mut h);
        norm1 = vec_norm(w);
    }
    let breakdown = norm1 <= real::<T>(1e-14) * norm0;
    if !breakdown {
        let inv = Cplx::new(T::one() / norm1, T::zero());
        for wi in w.iter_mut() {
            *wi *= inv;
        }
    }
    OrthoResult { coefficients: h, norm: norm1, breakdown }
}

/// Orthonormal basis with expansion bookkeeping.
pub struct OrthoBasis<T> {
    dim: usize,
    columns: Vec<Vec<Cplx<T>>>,
}

impl<T: Scalar> OrthoBasis<T> {
    pub fn new(dim: usize) -> Self {
        OrthoBasis { dim, columns: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, j: usize) -> &[Cplx<T>] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<Cplx<T>>] {
        &self.columns
    }

    /// Push a vector assumed already orthonormal against the basis.
    pub fn push_unchecked(&mut self, v: Vec<Cplx<T>>) {
        debug_assert_eq!(v.len(), self.dim);
        self.columns.push(v);
    }

    /// Orthogonalize and append; returns the expansion data.
    pub fn expand(&mut self, mut w: Vec<Cplx<T>>) -> OrthoResult<T> {
        let r = icgs(&self.columns, &mut w);
        if !r.breakdown {
            self.columns.push(w);
        }
        r
    }

    /// max |V^H V - I| entry, for orthonormality diagnostics.
    pub fn gram_defect(&self) -> T {
        let k = self.columns.len();
        let mut worst = T::zero();
        for i in 0..k {
            for j in i..k {
                let d = vec_dot(&self.columns[i], &self.columns[j]);
                let target = if i == j { T::one() } else { T::zero() };
                let err = (d - Cplx::new(target, T::zero())).norm();
                worst = worst.max(err);
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn rand_vec(n: usize, seed: u64) -> Vec<Complex64> {
        let mut s = seed | 1;
        (0..n)
            .map(|_| {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                let re = (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                let im = (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                Complex64::new(re, im)
            })
            .collect()
    }

    #[test]
    fn vector_in_span_breaks_down() {
        let mut basis = OrthoBasis::new(4);
        let r = basis.expand(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        assert!(!r.breakdown);
        let r = basis.expand(vec![
            Complex64::new(0.5, 0.5),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        assert!(r.breakdown);
    }

    #[test]
    fn orthogonal_vector_untouched() {
        let mut basis = OrthoBasis::new(3);
        basis.push_unchecked(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        let w = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(0.0, 0.0),
        ];
        let r = basis.expand(w);
        assert!(!r.breakdown);
        assert!((r.norm - 2.0).abs() < 1e-15);
        assert!(r.coefficients[0].norm() < 1e-15);
    }

    #[test]
    fn many_expansions_stay_orthonormal() {
        let n = 500;
        let mut basis = OrthoBasis::new(n);
        let mut accepted = 0;
        for k in 0..200 {
            let w = rand_vec(n, 0x5EED + k as u64 * 7919);
            if !basis.expand(w).breakdown {
                accepted += 1;
            }
        }
        assert_eq!(accepted, 200);
        assert!(basis.gram_defect() <= 1e-12, "defect {}", basis.gram_defect());
    }

    #[test]
    fn idempotent_to_machine_precision() {
        let n = 100;
        let mut basis = OrthoBasis::new(n);
        for k in 0..10 {
            basis.expand(rand_vec(n, 31 + k));
        }
        let mut w = rand_vec(n, 999);
        let r1 = icgs(basis.columns(), &mut w);
        assert!(!r1.breakdown);
        let before = w.clone();
        let r2 = icgs(basis.columns(), &mut w);
        assert!(!r2.breakdown);
        let diff: f64 = w
            .iter()
            .zip(&before)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-13, "changed by {diff}");
    }
}
