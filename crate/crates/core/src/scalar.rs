//! Scalar abstraction: the whole toolkit is generic over the real floating
//! type, with complex arithmetic built on top via [`num_complex::Complex`].

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Real scalar type for all mesh geometry and matrix entries: f32 or f64.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + serde::Serialize
    + serde::de::DeserializeOwned
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over the working scalar.
pub type Cplx<T> = Complex<T>;

/// Convert an f64 literal into the working scalar.
#[inline]
pub fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Complex literal from f64 parts.
#[inline]
pub fn cplx<T: Scalar>(re: f64, im: f64) -> Cplx<T> {
    Complex::new(real(re), real(im))
}

/// i (the imaginary unit).
#[inline]
pub fn imag_unit<T: Scalar>() -> Cplx<T> {
    Complex::new(T::zero(), T::one())
}

/// 2*pi in the working scalar.
#[inline]
pub fn two_pi<T: Scalar>() -> T {
    T::PI() + T::PI()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm<T: Scalar>(v: &[Cplx<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
}

/// Conjugated dot product `a^H b`.
pub fn vec_dot<T: Scalar>(a: &[Cplx<T>], b: &[Cplx<T>]) -> Cplx<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// y += alpha * x
pub fn vec_axpy<T: Scalar>(alpha: Cplx<T>, x: &[Cplx<T>], y: &mut [Cplx<T>]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

/// Scale a vector in place.
pub fn vec_scale<T: Scalar>(alpha: Cplx<T>, x: &mut [Cplx<T>]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}
