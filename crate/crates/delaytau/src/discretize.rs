//! Finite-dimensional realizations of the delay system.
//!
//! A single-delay system
//!
//! ```text
//! x'(t) = A0 x(t) + A1 x(t - tau) + B u(t),      y(t) = C x(t)
//! ```
//!
//! is discretized by approximating the history segment on `[-tau, 0]` with
//! a degree-`N` polynomial. Two constructions are provided, plus a sparse
//! variant of the first:
//!
//! * **Weak form (tau)**: the segment is expanded in basis coefficients
//!   `c_0..c_N` (each a vector in R^n). Matching the basis coefficients
//!   `0..N-1` of the transport equation and closing the system with the
//!   boundary condition at `theta = 0` yields a pencil `E c' = A c` with
//!
//!   ```text
//!   E = [phi_k(0) row; I | 0] (x) I_n,
//!   A = [A0 phi_k(0) + A1 phi_k(-tau) row block; D (x) I_n],
//!   ```
//!
//!   where `D[j][k] = <phi_k', phi_j> / ||phi_j||^2` is the coefficient
//!   differentiation map. The boundary/system block sits first.
//!
//! * **Collocation**: the segment is represented by its values on a mesh
//!   `theta_0 < .. < theta_N = 0`. Transport is enforced exactly at the
//!   first `N` mesh points through the Lagrange differentiation matrix,
//!   and the mesh row at the origin carries the system dynamics. The
//!   result is an ordinary state-space model (`E` is the identity). The
//!   boundary/system block sits last, mirroring the mesh ordering.
//!
//! * **Mixed bases**: rewriting the first-kind Chebyshev tau equations in
//!   second-kind coordinates (an invertible recombination of the same
//!   equations) turns the dense differentiation block into a single
//!   superdiagonal, giving an `O(N)`-sparse pencil with the identical
//!   transfer function.
//!
//! All realizations nest: the order-`N1` matrices are exact leading
//! sub-blocks of the order-`N2` ones for `N1 < N2`, because every entry is
//! computed by a rule that depends only on its own indices (quadrature
//! node counts included).

use crate::error::{Error, Result};
use crate::numerics::{kron, Mat};
use crate::orthopoly::{
    basis_zeros, eval_basis_all, eval_basis_derivative_all, gauss_rule, norm_squared, BasisKind,
    BasisSpec,
};
use crate::scalar::Scalar;

/// Realizations whose top-degree basis value at the origin falls below
/// this threshold are rejected: `phi_N(0)` is (up to sign) the pencil
/// determinant of `E`, so a vanishing value makes the realization
/// singular.
pub const DEGENERATE_BASIS_TOL: f64 = 1e-12;

/// The delay system `x' = A0 x + A1 x(.-tau) + B u`, `y = C x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySystem<T> {
    a0: Mat<T>,
    a1: Mat<T>,
    b: Mat<T>,
    c: Mat<T>,
    tau: T,
}

impl<T: Scalar> DelaySystem<T> {
    /// Validate dimensions and build the system description.
    pub fn new(a0: Mat<T>, a1: Mat<T>, b: Mat<T>, c: Mat<T>, tau: T) -> Result<Self> {
        if !a0.is_square() {
            return Err(Error::DimensionMismatch {
                op: "DelaySystem",
                detail: format!("A0 must be square, got {}x{}", a0.rows(), a0.cols()),
            });
        }
        let n = a0.rows();
        if n == 0 {
            return Err(Error::DimensionMismatch {
                op: "DelaySystem",
                detail: "A0 is empty".into(),
            });
        }
        if a1.rows() != n || a1.cols() != n {
            return Err(Error::DimensionMismatch {
                op: "DelaySystem",
                detail: format!(
                    "A1 is {}x{}, expected {n}x{n} to match A0",
                    a1.rows(),
                    a1.cols()
                ),
            });
        }
        if b.rows() != n {
            return Err(Error::DimensionMismatch {
                op: "DelaySystem",
                detail: format!("B has {} rows, expected {n}", b.rows()),
            });
        }
        if c.cols() != n {
            return Err(Error::DimensionMismatch {
                op: "DelaySystem",
                detail: format!("C has {} columns, expected {n}", c.cols()),
            });
        }
        if b.cols() == 0 || c.rows() == 0 {
            return Err(Error::DimensionMismatch {
                op: "DelaySystem",
                detail: "B and C must have at least one column/row".into(),
            });
        }
        if !tau.is_finite() || tau <= T::zero() {
            return Err(Error::InvalidArgument {
                arg: "tau",
                reason: format!("delay must be finite and positive, got {tau}"),
            });
        }
        Ok(DelaySystem { a0, a1, b, c, tau })
    }

    /// Convenience constructor for a scalar system (`n = p = q = 1`).
    pub fn scalar(a0: T, a1: T, b: T, c: T, tau: T) -> Result<Self> {
        DelaySystem::new(
            Mat::from_flat(1, 1, vec![a0])?,
            Mat::from_flat(1, 1, vec![a1])?,
            Mat::from_flat(1, 1, vec![b])?,
            Mat::from_flat(1, 1, vec![c])?,
            tau,
        )
    }

    pub fn a0(&self) -> &Mat<T> {
        &self.a0
    }
    pub fn a1(&self) -> &Mat<T> {
        &self.a1
    }
    pub fn b(&self) -> &Mat<T> {
        &self.b
    }
    pub fn c(&self) -> &Mat<T> {
        &self.c
    }
    pub fn tau(&self) -> T {
        self.tau
    }
    /// State dimension `n`.
    pub fn state_dim(&self) -> usize {
        self.a0.rows()
    }
    /// Input count `p`.
    pub fn inputs(&self) -> usize {
        self.b.cols()
    }
    /// Output count `q`.
    pub fn outputs(&self) -> usize {
        self.c.rows()
    }

    /// Parse the JSON description
    /// `{"A0": [[..]], "A1": [[..]], "B": [[..]], "C": [[..]], "tau": t}`.
    /// Error messages name the offending field.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument {
                arg: "json",
                reason: format!("system description is not valid JSON: {e}"),
            })?;
        let obj = value.as_object().ok_or_else(|| Error::InvalidArgument {
            arg: "json",
            reason: "system description must be a JSON object".into(),
        })?;
        let matrix = |name: &'static str| -> Result<Mat<T>> {
            let field = obj.get(name).ok_or(Error::InvalidArgument {
                arg: "json",
                reason: format!("missing field {name}"),
            })?;
            let rows = field.as_array().ok_or(Error::InvalidArgument {
                arg: "json",
                reason: format!("field {name} must be an array of rows"),
            })?;
            let mut data: Vec<Vec<T>> = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                let entries = row.as_array().ok_or(Error::InvalidArgument {
                    arg: "json",
                    reason: format!("field {name}, row {i}: expected an array of numbers"),
                })?;
                let mut out = Vec::with_capacity(entries.len());
                for (j, e) in entries.iter().enumerate() {
                    let x = e.as_f64().ok_or(Error::InvalidArgument {
                        arg: "json",
                        reason: format!("field {name}, entry ({i},{j}): expected a number"),
                    })?;
                    out.push(T::of(x));
                }
                data.push(out);
            }
            Mat::from_rows(&data).map_err(|_| Error::InvalidArgument {
                arg: "json",
                reason: format!("field {name}: rows have inconsistent lengths"),
            })
        };
        let a0 = matrix("A0")?;
        let a1 = matrix("A1")?;
        let b = matrix("B")?;
        let c = matrix("C")?;
        let tau = obj
            .get("tau")
            .and_then(|v| v.as_f64())
            .ok_or(Error::InvalidArgument {
                arg: "json",
                reason: "missing or non-numeric field tau".into(),
            })?;
        DelaySystem::new(a0, a1, b, c, T::of(tau))
    }

    /// Serialize to the JSON form accepted by [`DelaySystem::from_json_str`].
    pub fn to_json_value(&self) -> serde_json::Value {
        let mat = |m: &Mat<T>| -> serde_json::Value {
            let rows: Vec<serde_json::Value> = (0..m.rows())
                .map(|i| {
                    serde_json::Value::Array(
                        m.row(i)
                            .iter()
                            .map(|x| serde_json::json!(x.as_f64()))
                            .collect(),
                    )
                })
                .collect();
            serde_json::Value::Array(rows)
        };
        serde_json::json!({
            "A0": mat(&self.a0),
            "A1": mat(&self.a1),
            "B": mat(&self.b),
            "C": mat(&self.c),
            "tau": self.tau.as_f64(),
        })
    }
}

/// Common surface of the tau and collocation realizations: the pencil
/// `(A, E)` (with `E = None` meaning the identity) plus input and output
/// maps.
pub trait Realization<T: Scalar> {
    fn a(&self) -> &Mat<T>;
    /// Left-hand matrix of the pencil; `None` encodes the identity.
    fn e(&self) -> Option<&Mat<T>>;
    fn bm(&self) -> &Mat<T>;
    fn cm(&self) -> &Mat<T>;
    /// Dimension `n` of one state block.
    fn state_dim(&self) -> usize;
    /// Polynomial degree `N` of the history ansatz.
    fn degree(&self) -> usize;
    /// Total order `n (N+1)` of the realization.
    fn order(&self) -> usize {
        self.a().rows()
    }
}

/// Pencil realization from the weak-form construction: `E c' = A c`,
/// `y = Cm c`, of order `n (N+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauRealization<T> {
    pub e: Mat<T>,
    pub a: Mat<T>,
    pub bm: Mat<T>,
    pub cm: Mat<T>,
    pub degree: usize,
    pub state_dim: usize,
    pub spec: BasisSpec<T>,
}

impl<T: Scalar> Realization<T> for TauRealization<T> {
    fn a(&self) -> &Mat<T> {
        &self.a
    }
    fn e(&self) -> Option<&Mat<T>> {
        Some(&self.e)
    }
    fn bm(&self) -> &Mat<T> {
        &self.bm
    }
    fn cm(&self) -> &Mat<T> {
        &self.cm
    }
    fn state_dim(&self) -> usize {
        self.state_dim
    }
    fn degree(&self) -> usize {
        self.degree
    }
}

/// Collocation mesh: `N+1` strictly increasing points in `[-tau, 0]`
/// whose last point is exactly the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationMesh<T> {
    points: Vec<T>,
    tau: T,
}

impl<T: Scalar> CollocationMesh<T> {
    /// Validate and store a mesh. Points must be finite, strictly
    /// increasing with a spacing resolvable in working precision, inside
    /// `[-tau, 0]`, and end exactly at `0`.
    pub fn new(points: Vec<T>, tau: T) -> Result<Self> {
        if !tau.is_finite() || tau <= T::zero() {
            return Err(Error::InvalidArgument {
                arg: "tau",
                reason: format!("delay must be finite and positive, got {tau}"),
            });
        }
        if points.len() < 2 {
            return Err(Error::InvalidArgument {
                arg: "mesh",
                reason: "a mesh needs at least two points (degree N >= 1)".into(),
            });
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument {
                arg: "mesh",
                reason: "mesh points must be finite".into(),
            });
        }
        let last = *points.last().unwrap();
        if last != T::zero() {
            return Err(Error::InvalidArgument {
                arg: "mesh",
                reason: format!("last mesh point must be exactly 0, got {last}"),
            });
        }
        let slack = tau * T::eps() * T::of(4.0);
        if points[0] < -tau - slack {
            return Err(Error::InvalidArgument {
                arg: "mesh",
                reason: format!("first mesh point {} lies below -tau = {}", points[0], -tau),
            });
        }
        let min_gap = tau * T::eps() * T::of(8.0);
        for w in points.windows(2) {
            if w[1] - w[0] <= min_gap {
                return Err(Error::InvalidArgument {
                    arg: "mesh",
                    reason: format!(
                        "mesh points {} and {} coincide or are out of order",
                        w[0], w[1]
                    ),
                });
            }
        }
        Ok(CollocationMesh { points, tau })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }
    pub fn tau(&self) -> T {
        self.tau
    }
    /// Polynomial degree `N` (one less than the point count).
    pub fn degree(&self) -> usize {
        self.points.len() - 1
    }
}

/// State-space realization from collocation: `v' = A v`, `y = Cm v`, with
/// the identity left-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocRealization<T> {
    pub a: Mat<T>,
    pub bm: Mat<T>,
    pub cm: Mat<T>,
    pub state_dim: usize,
    pub mesh: CollocationMesh<T>,
}

impl<T: Scalar> Realization<T> for CollocRealization<T> {
    fn a(&self) -> &Mat<T> {
        &self.a
    }
    fn e(&self) -> Option<&Mat<T>> {
        None
    }
    fn bm(&self) -> &Mat<T> {
        &self.bm
    }
    fn cm(&self) -> &Mat<T> {
        &self.cm
    }
    fn state_dim(&self) -> usize {
        self.state_dim
    }
    fn degree(&self) -> usize {
        self.mesh.degree()
    }
}

/// Row of basis values `[phi_0(theta), .., phi_N(theta)]` as a
/// `1 x (N+1)` matrix. Kronecker this with `I_n` to get the evaluation
/// functional on block coefficient vectors.
pub fn eval_row<T: Scalar>(spec: &BasisSpec<T>, n_deg: usize, theta: T) -> Result<Mat<T>> {
    let vals = eval_basis_all(spec, n_deg, theta)?;
    Mat::from_rows(&[vals])
}

/// Coefficient-space differentiation matrix: `N x (N+1)` with
/// `D[j][k] = <phi_k', phi_j> / ||phi_j||^2`.
///
/// Every entry is integrated with a Gauss rule of `max(j, k) + 2` nodes
/// and normalized by `||phi_j||^2` from a `j + 2`-node rule. Both node
/// counts depend only on the entry's own indices, never on `N`, which is
/// what makes realizations of different orders agree exactly on their
/// common entries.
pub fn diff_matrix<T: Scalar>(spec: &BasisSpec<T>, n_deg: usize) -> Result<Mat<T>> {
    if n_deg == 0 {
        return Err(Error::InvalidArgument {
            arg: "degree",
            reason: "the differentiation matrix needs degree N >= 1".into(),
        });
    }
    let mut d = Mat::zeros(n_deg, n_deg + 1);
    let mut norms = Vec::with_capacity(n_deg);
    for j in 0..n_deg {
        norms.push(norm_squared(spec, j)?);
    }
    // Group entries by their rule size m = max(j, k) + 2 and evaluate the
    // basis and its derivative once per node.
    for q in 0..=n_deg {
        let rule = gauss_rule(spec, q + 2)?;
        let mut vals = Vec::with_capacity(rule.nodes.len());
        let mut dvals = Vec::with_capacity(rule.nodes.len());
        for &t in &rule.nodes {
            vals.push(eval_basis_all(spec, n_deg, t)?);
            dvals.push(eval_basis_derivative_all(spec, n_deg, 1, t)?);
        }
        // Entries with max(j, k) == q: the row j = q (k = 0..q, if q is a
        // valid row) and the column k = q (j = 0..q-1).
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        if q < n_deg {
            for k in 0..=q {
                pairs.push((q, k));
            }
        }
        for j in 0..q.min(n_deg) {
            pairs.push((j, q));
        }
        for (j, k) in pairs {
            if k == 0 {
                continue; // derivative of the constant basis function
            }
            let mut acc = T::zero();
            for (i, &w) in rule.weights.iter().enumerate() {
                acc += w * dvals[i][k] * vals[i][j];
            }
            d[(j, k)] = acc / norms[j];
        }
    }
    Ok(d)
}

fn check_tau_match<T: Scalar>(spec_tau: T, sys_tau: T) -> Result<()> {
    if spec_tau != sys_tau {
        return Err(Error::InvalidArgument {
            arg: "spec",
            reason: format!(
                "basis delay {spec_tau} differs from system delay {sys_tau}"
            ),
        });
    }
    Ok(())
}

fn check_not_degenerate<T: Scalar>(phi_n_at_zero: T) -> Result<()> {
    let magnitude = phi_n_at_zero.abs().as_f64();
    if magnitude <= DEGENERATE_BASIS_TOL {
        return Err(Error::DegenerateBasis { magnitude });
    }
    Ok(())
}

/// Assemble the weak-form pencil realization of order `n (N+1)`.
pub fn build_tau<T: Scalar>(
    sys: &DelaySystem<T>,
    spec: &BasisSpec<T>,
    n_deg: usize,
) -> Result<TauRealization<T>> {
    check_tau_match(spec.tau(), sys.tau())?;
    if n_deg == 0 {
        return Err(Error::InvalidArgument {
            arg: "degree",
            reason: "the realization needs degree N >= 1".into(),
        });
    }
    let n = sys.state_dim();
    let row0 = eval_row(spec, n_deg, T::zero())?;
    let rowtau = eval_row(spec, n_deg, -sys.tau())?;
    check_not_degenerate(row0[(0, n_deg)])?;
    // Scalar E pattern: boundary row of basis values over [I_N | 0].
    let mut e_scalar = Mat::zeros(n_deg + 1, n_deg + 1);
    for k in 0..=n_deg {
        e_scalar[(0, k)] = row0[(0, k)];
    }
    for j in 1..=n_deg {
        e_scalar[(j, j - 1)] = T::one();
    }
    let e = kron(&e_scalar, &Mat::identity(n));
    let d = diff_matrix(spec, n_deg)?;
    let mut a = Mat::zeros(n * (n_deg + 1), n * (n_deg + 1));
    let top = kron(&row0, sys.a0()).add(&kron(&rowtau, sys.a1()));
    a.set_block(0, 0, &top);
    a.set_block(n, 0, &kron(&d, &Mat::identity(n)));
    let mut bm = Mat::zeros(n * (n_deg + 1), sys.inputs());
    bm.set_block(0, 0, sys.b());
    let cm = kron(&row0, sys.c());
    Ok(TauRealization {
        e,
        a,
        bm,
        cm,
        degree: n_deg,
        state_dim: n,
        spec: *spec,
    })
}

/// Assemble the sparse mixed-basis pencil: first-kind Chebyshev
/// coefficients on the state side, the same tau equations recombined into
/// second-kind coordinates on the test side.
///
/// The recombination acts only on the `N` differentiation rows (the
/// boundary/system block is untouched), is invertible (triangular with
/// nonzero diagonal), and therefore preserves the transfer function
/// exactly while compressing the differentiation block to the single
/// superdiagonal `D[k-1][k] = 2k / tau` — `N` nonzeros instead of a dense
/// triangle.
pub fn build_tau_mixed<T: Scalar>(sys: &DelaySystem<T>, n_deg: usize) -> Result<TauRealization<T>> {
    if n_deg == 0 {
        return Err(Error::InvalidArgument {
            arg: "degree",
            reason: "the realization needs degree N >= 1".into(),
        });
    }
    let spec = BasisSpec::new(BasisKind::Chebyshev1, sys.tau())?;
    let n = sys.state_dim();
    let row0 = eval_row(&spec, n_deg, T::zero())?;
    let rowtau = eval_row(&spec, n_deg, -sys.tau())?;
    check_not_degenerate(row0[(0, n_deg)])?;
    let half = T::of(0.5);
    // Lower E block: second-kind coordinates of the first-kind expansion,
    // truncated to the rows being recombined. T_0 = U_0, T_1 = U_1 / 2,
    // T_k = (U_k - U_{k-2}) / 2.
    let mut e_scalar = Mat::zeros(n_deg + 1, n_deg + 1);
    for k in 0..=n_deg {
        e_scalar[(0, k)] = row0[(0, k)];
    }
    e_scalar[(1, 0)] = T::one();
    for j in 1..n_deg {
        e_scalar[(1 + j, j)] = half;
    }
    // The -1/2 band stays inside columns 0..N-1; column N is untouched
    // because the recombination mixes existing rows whose last column is
    // already zero.
    if n_deg >= 3 {
        for j in 0..=(n_deg - 3) {
            e_scalar[(1 + j, j + 2)] = -half;
        }
    }
    let e = kron(&e_scalar, &Mat::identity(n));
    // Differentiation block: d/dtheta T_k = (2k / tau) U_{k-1}.
    let mut d = Mat::zeros(n_deg, n_deg + 1);
    let two_over_tau = T::of(2.0) / sys.tau();
    for k in 1..=n_deg {
        d[(k - 1, k)] = two_over_tau * T::of_usize(k);
    }
    let mut a = Mat::zeros(n * (n_deg + 1), n * (n_deg + 1));
    let top = kron(&row0, sys.a0()).add(&kron(&rowtau, sys.a1()));
    a.set_block(0, 0, &top);
    a.set_block(n, 0, &kron(&d, &Mat::identity(n)));
    let mut bm = Mat::zeros(n * (n_deg + 1), sys.inputs());
    bm.set_block(0, 0, sys.b());
    let cm = kron(&row0, sys.c());
    Ok(TauRealization {
        e,
        a,
        bm,
        cm,
        degree: n_deg,
        state_dim: n,
        spec,
    })
}

/// Scaled and shifted Chebyshev extremal points:
/// `theta_k = -(tau/2) (cos(pi k / N) + 1)` stored ascending, with the
/// endpoints forced to exactly `-tau` and `0`.
pub fn chebyshev_extremal_mesh<T: Scalar>(tau: T, n_deg: usize) -> Result<CollocationMesh<T>> {
    if n_deg == 0 {
        return Err(Error::InvalidArgument {
            arg: "degree",
            reason: "a collocation mesh needs degree N >= 1".into(),
        });
    }
    let mut points = Vec::with_capacity(n_deg + 1);
    for k in 0..=n_deg {
        if k == 0 {
            points.push(-tau);
        } else if k == n_deg {
            points.push(T::zero());
        } else {
            let angle = std::f64::consts::PI * k as f64 / n_deg as f64;
            points.push(-(tau * T::of(0.5)) * (T::of(angle.cos()) + T::one()));
        }
    }
    CollocationMesh::new(points, tau)
}

/// Mesh consisting of the `N` zeros of `phi_N` plus the origin; on this
/// mesh the collocation realization reproduces the weak-form transfer
/// function exactly.
pub fn zeros_plus_origin_mesh<T: Scalar>(
    spec: &BasisSpec<T>,
    n_deg: usize,
) -> Result<CollocationMesh<T>> {
    if n_deg == 0 {
        return Err(Error::InvalidArgument {
            arg: "degree",
            reason: "a collocation mesh needs degree N >= 1".into(),
        });
    }
    let mut points = basis_zeros(spec, n_deg)?;
    points.push(T::zero());
    CollocationMesh::new(points, spec.tau())
}

/// Barycentric interpolation weights for a set of nodes, computed with a
/// capacity rescale so intermediate products stay representable, then
/// normalized by the largest magnitude.
pub(crate) fn barycentric_weights<T: Scalar>(points: &[T]) -> Vec<T> {
    let m = points.len();
    let span = *points.last().unwrap() - points[0];
    let capacity = span * T::of(0.25);
    let mut w = vec![T::one(); m];
    for k in 0..m {
        for j in 0..m {
            if j != k {
                w[k] = w[k] / ((points[k] - points[j]) / capacity);
            }
        }
    }
    let max = w
        .iter()
        .map(|x| x.abs())
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    for x in w.iter_mut() {
        *x = *x / max;
    }
    w
}

/// Values of the Lagrange cardinal functions `l_k(t)` at an arbitrary
/// point, by the barycentric second formula (exact indicator when `t` is
/// a node).
pub(crate) fn lagrange_values_at<T: Scalar>(points: &[T], w: &[T], t: T) -> Vec<T> {
    let m = points.len();
    for k in 0..m {
        if t == points[k] {
            let mut out = vec![T::zero(); m];
            out[k] = T::one();
            return out;
        }
    }
    let mut denom = T::zero();
    let mut terms = Vec::with_capacity(m);
    for k in 0..m {
        let term = w[k] / (t - points[k]);
        denom += term;
        terms.push(term);
    }
    terms.into_iter().map(|x| x / denom).collect()
}

/// Differentiation rows of the Lagrange interpolant: the first
/// `len - 1` rows of the full differentiation matrix,
/// `Dm[j][k] = l_k'(theta_j)`, with the diagonal from the zero-row-sum
/// identity.
pub(crate) fn lagrange_diff_rows<T: Scalar>(points: &[T], w: &[T]) -> Mat<T> {
    let n_deg = points.len() - 1;
    let mut dm = Mat::zeros(n_deg, n_deg + 1);
    for j in 0..n_deg {
        let mut diag = T::zero();
        for k in 0..=n_deg {
            if k != j {
                let v = (w[k] / w[j]) / (points[j] - points[k]);
                dm[(j, k)] = v;
                diag -= v;
            }
        }
        dm[(j, j)] = diag;
    }
    dm
}

/// Assemble the collocation realization on the given mesh.
pub fn build_collocation<T: Scalar>(
    sys: &DelaySystem<T>,
    mesh: &CollocationMesh<T>,
) -> Result<CollocRealization<T>> {
    check_tau_match(mesh.tau(), sys.tau())?;
    let n = sys.state_dim();
    let n_deg = mesh.degree();
    let pts = mesh.points();
    let w = barycentric_weights(pts);
    if w.iter().any(|x| !x.is_finite() || *x == T::zero()) {
        return Err(Error::Numerical {
            op: "build_collocation",
            detail: "barycentric weights degenerated (mesh too clustered)".into(),
        });
    }
    let dm = lagrange_diff_rows(pts, &w);
    let mut a = Mat::zeros(n * (n_deg + 1), n * (n_deg + 1));
    a.set_block(0, 0, &kron(&dm, &Mat::identity(n)));
    // System row at the origin node: A0 l_k(0) + A1 l_k(-tau);
    // l_k(0) = delta_{kN} because the origin is the last mesh point.
    let l_at_delay = lagrange_values_at(pts, &w, -sys.tau());
    let lrow = Mat::from_rows(&[l_at_delay])?;
    let mut sys_row = kron(&lrow, sys.a1());
    let mut e_last = Mat::zeros(1, n_deg + 1);
    e_last[(0, n_deg)] = T::one();
    sys_row = sys_row.add(&kron(&e_last, sys.a0()));
    a.set_block(n * n_deg, 0, &sys_row);
    let mut bm = Mat::zeros(n * (n_deg + 1), sys.inputs());
    bm.set_block(n * n_deg, 0, sys.b());
    let mut cm = Mat::zeros(sys.outputs(), n * (n_deg + 1));
    cm.set_block(0, n * n_deg, sys.c());
    Ok(CollocRealization {
        a,
        bm,
        cm,
        state_dim: n,
        mesh: mesh.clone(),
    })
}
