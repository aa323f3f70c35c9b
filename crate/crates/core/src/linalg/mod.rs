//! Complex sparse-matrix kernels: CSR storage, sparse LU with partial
//! pivoting, preconditioned GMRES, iterated Gram-Schmidt and the dense
//! kernels backing projected eigenproblems.

pub mod dense;
pub mod gmres;
pub mod lu;
pub mod mm;
pub mod op;
pub mod ortho;
pub mod sparse;

pub use dense::{DenseLu, DenseMatrix};
pub use gmres::{gmres, GmresFailure, GmresSolution};
pub use lu::{lu_factor, FactorHandle};
pub use op::{CombinedOp, FnOp, LinOp};
pub use ortho::{icgs, OrthoBasis, OrthoResult};
pub use sparse::{ComplexSparseMatrix, TripletBuilder};
