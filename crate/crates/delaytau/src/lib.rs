//! Spectral discretization of linear time-invariant systems with one
//! discrete delay.
//!
//! The systems treated here have the form
//!
//! ```text
//! x'(t) = A0 x(t) + A1 x(t - tau) + B u(t),      y(t) = C x(t),
//! ```
//!
//! whose transfer function `C (sI - A0 - A1 e^{-s tau})^{-1} B` is
//! irrational because of the delay term. The crate replaces the delay line
//! by a degree-`N` polynomial ansatz on `[-tau, 0]`, expanded in a Jacobi
//! polynomial family (Chebyshev of either kind, Legendre, or a general
//! Jacobi weight), and produces finite-dimensional realizations whose
//! transfer functions converge to the true one:
//!
//! * a weak-form (tau) realization built from inner products against the
//!   basis, yielding a matrix pencil `(A_N, E_N)`;
//! * a collocation realization built from a differentiation matrix on a
//!   point mesh, yielding an ordinary state-space model.
//!
//! On top of the realizations the crate computes characteristic-root
//! approximations with Newton refinement against the true transcendental
//! characteristic function, rational approximations `r_N(s, theta)` of the
//! delay exponential `e^{s theta}` with their moment-matching defects, and
//! `H^2` norms through a generalized Lyapunov equation, including the
//! bivariate kernel that represents the norm as an integral operator on
//! the delay interval.
//!
//! Everything is generic over the working precision through the
//! [`scalar::Scalar`] trait (`f32` or `f64`); the crate root exports `f64`
//! aliases for the common types since that is the precision the library is
//! normally driven at.

pub mod discretize;
pub mod error;
pub mod h2;
pub mod numerics;
pub mod orthopoly;
pub mod rational;
pub mod scalar;
pub mod spectrum;

pub use error::{Error, Result};

/// Dense real matrix with `f64` entries.
pub type Mat64 = numerics::Mat<f64>;
/// Dense complex matrix with `f64` components.
pub type CMat64 = numerics::Mat<num_complex::Complex<f64>>;
/// Spectrum (pencil eigenvalues plus residuals) at `f64` precision.
pub type Spectrum64 = numerics::Spectrum<f64>;
/// Basis specification at `f64` precision.
pub type BasisSpec64 = orthopoly::BasisSpec<f64>;
/// Delay system at `f64` precision.
pub type DelaySystem64 = discretize::DelaySystem<f64>;
/// Weak-form pencil realization at `f64` precision.
pub type TauRealization64 = discretize::TauRealization<f64>;
/// Collocation realization at `f64` precision.
pub type CollocRealization64 = discretize::CollocRealization<f64>;
/// Collocation mesh at `f64` precision.
pub type CollocationMesh64 = discretize::CollocationMesh<f64>;
/// Rational approximant of the delay exponential at `f64` precision.
pub type RationalFunction64 = rational::RationalFunction<f64>;
/// Characteristic-root report at `f64` precision.
pub type RootReport64 = spectrum::RootReport<f64>;
/// Lyapunov solution at `f64` precision.
pub type LyapunovSolution64 = h2::LyapunovSolution<f64>;
