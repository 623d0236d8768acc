//! Dense linear algebra kernels: matrices, LU factorization, and the
//! nonsymmetric eigenvalue problem.
//!
//! Everything here is written directly against the [`Entry`](crate::scalar::Entry)
//! and [`Scalar`](crate::scalar::Scalar) traits so the same kernels serve
//! `f32`, `f64`, and their complex extensions. The matrices this crate
//! produces are dense and small (a few hundred rows at the upper end), so
//! the kernels favor simplicity and verifiable behavior over blocking or
//! cache tuning.

pub mod eig;
pub mod lu;
pub mod mat;

pub use eig::{
    eigen_dense, eigenvalues_pencil, schur_decomposition, smallest_singular_value_estimate,
    EigenDecomposition, Spectrum,
};
pub use lu::{lu_factor, solve_linear, Lu};
pub use mat::{kron, Mat};
