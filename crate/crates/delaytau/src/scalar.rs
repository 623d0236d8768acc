//! Scalar abstraction for the numeric kernels.
//!
//! Every algorithm in this crate is generic over a real floating-point type
//! through [`Scalar`], so the whole stack can be instantiated at `f32` or
//! `f64` (the crate root exports `f64` aliases, which is what the CLI and
//! the test suites use). The dense linear-algebra kernels additionally work
//! on complex matrices, so they are written against [`Entry`], the common
//! surface of real and complex floating-point numbers.

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::ops::Neg;

/// A matrix entry: a real or complex floating-point number.
///
/// This is the minimal surface needed by LU factorization, Hessenberg
/// reduction, and the shifted QR iteration: field arithmetic, conjugation,
/// and a nonnegative magnitude for pivot selection.
pub trait Entry:
    Copy
    + PartialEq
    + Debug
    + Display
    + NumAssign
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// The real scalar type underlying this entry type.
    type Real: Scalar;

    /// Magnitude: absolute value for real entries, modulus for complex ones.
    fn modulus(self) -> Self::Real;

    /// Complex conjugate; the identity on real entries.
    fn conj_entry(self) -> Self;

    /// Embed a real scalar.
    fn from_real(r: Self::Real) -> Self;

    /// Multiply by a real scalar.
    fn scale(self, r: Self::Real) -> Self;
}

/// A real floating-point scalar (`f32` or `f64`).
///
/// Extends `num_traits::Float` with the conversions the algorithms need to
/// produce constants, plus the [`Entry`] surface so real matrices can share
/// the generic kernels with complex ones.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + LowerExp + Entry<Real = Self>
{
    /// Machine epsilon of the concrete type.
    fn eps() -> Self {
        Self::epsilon()
    }

    /// Convert an `f64` constant; panics only for non-finite inputs on
    /// types that cannot represent them, which never occurs for the
    /// constants used in this crate.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite constant must convert")
    }

    /// Convert a small nonnegative integer (degrees, dimensions).
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("small integer must convert")
    }

    /// Lossy view as `f64` for diagnostics and error payloads.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_real_entry {
    ($t:ty) => {
        impl Entry for $t {
            type Real = $t;

            #[inline]
            fn modulus(self) -> $t {
                self.abs()
            }

            #[inline]
            fn conj_entry(self) -> $t {
                self
            }

            #[inline]
            fn from_real(r: $t) -> $t {
                r
            }

            #[inline]
            fn scale(self, r: $t) -> $t {
                self * r
            }
        }

        impl Scalar for $t {}
    };
}

impl_real_entry!(f32);
impl_real_entry!(f64);

impl<T: Scalar> Entry for Complex<T> {
    type Real = T;

    #[inline]
    fn modulus(self) -> T {
        self.norm()
    }

    #[inline]
    fn conj_entry(self) -> Self {
        self.conj()
    }

    #[inline]
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }

    #[inline]
    fn scale(self, r: T) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
}
