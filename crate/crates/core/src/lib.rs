//! Thermoacoustic modal analysis on finite-volume meshes.
//!
//! The crate assembles the frequency-domain Helmholtz equation with
//! heat-release coupling into complex sparse matrices and solves the
//! resulting linear, quadratic or nonlinear eigenvalue problem with
//! shift-and-invert Krylov methods. Everything is generic over the real
//! scalar ([`Scalar`]); the `*64` aliases below pin the usual f64 build.

pub mod case;
pub mod error;
pub mod geom;
pub mod linalg;
pub mod mesh;
pub mod scalar;

pub use error::{Error, Result};
pub use geom::Vec3;
pub use scalar::{Cplx, Scalar};

/// f64 working-precision aliases.
pub type SparseMatrix64 = linalg::ComplexSparseMatrix<f64>;
pub type DenseMatrix64 = linalg::DenseMatrix<f64>;
pub type C64 = Cplx<f64>;
