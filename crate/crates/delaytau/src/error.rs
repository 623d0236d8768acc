//! Crate-wide error type.
//!
//! Diagnostics are carried as `f64` regardless of the working scalar type so
//! the error enum stays non-generic and cheap to pass around.

use thiserror::Error;

/// Errors produced by the discretization, rational-function, spectrum, and
/// norm computations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside its documented domain.
    #[error("invalid argument `{arg}`: {reason}")]
    InvalidArgument { arg: &'static str, reason: String },

    /// Matrix or vector dimensions do not conform.
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    /// A linear system was singular to working precision.
    #[error("singular system in {op}: pivot magnitude {pivot:.3e}")]
    Singular { op: &'static str, pivot: f64 },

    /// An iterative process exhausted its iteration budget.
    #[error("{op} did not converge within {iterations} iterations")]
    NonConvergence { op: &'static str, iterations: usize },

    /// A rational function was evaluated too close to one of its poles.
    #[error(
        "evaluation point too close to a pole: |den(s)| = {magnitude:.3e} < {threshold:.3e}"
    )]
    PoleProximity { magnitude: f64, threshold: f64 },

    /// A transfer function was evaluated at (or numerically at) a
    /// characteristic root, where the resolvent does not exist.
    #[error(
        "evaluation point is numerically a characteristic root (pivot magnitude {pivot:.3e})"
    )]
    CharacteristicRootProximity { pivot: f64 },

    /// Newton refinement of a characteristic root failed; carries the last
    /// iterate and its determinant residual.
    #[error(
        "root refinement stalled after {iterations} iterations at {re:.6e}{im:+.6e}i \
         (|det| = {residual:.3e})"
    )]
    Refinement {
        re: f64,
        im: f64,
        iterations: usize,
        residual: f64,
    },

    /// The realization has an eigenvalue on or right of the stability margin.
    #[error("realization is not exponentially stable: rightmost eigenvalue real part {rightmost:.6e}")]
    Unstable { rightmost: f64 },

    /// A highest-degree basis value vanished where the construction needs to
    /// divide by it.
    #[error("degenerate basis: |phi_N(0)| = {magnitude:.3e} is too small")]
    DegenerateBasis { magnitude: f64 },

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated in {op}: {detail}")]
    Precondition { op: &'static str, detail: String },

    /// A computed quantity failed its internal quality check.
    #[error("numerical check failed in {op}: {detail}")]
    Numerical { op: &'static str, detail: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable tag for each variant; used by the CLI's
    /// structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument { .. } => "invalid_argument",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Singular { .. } => "singular",
            Error::NonConvergence { .. } => "non_convergence",
            Error::PoleProximity { .. } => "pole_proximity",
            Error::CharacteristicRootProximity { .. } => "characteristic_root_proximity",
            Error::Refinement { .. } => "refinement",
            Error::Unstable { .. } => "unstable",
            Error::DegenerateBasis { .. } => "degenerate_basis",
            Error::Precondition { .. } => "precondition",
            Error::Numerical { .. } => "numerical",
        }
    }

    /// True for errors that indicate a bad request (configuration,
    /// arguments, dimensions) rather than a numerical failure.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument { .. }
                | Error::DimensionMismatch { .. }
                | Error::Precondition { .. }
        )
    }
}
