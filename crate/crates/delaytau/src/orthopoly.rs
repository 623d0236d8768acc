//! Shifted Jacobi polynomial families on the delay interval `[-tau, 0]`.
//!
//! Every basis this crate supports is a Jacobi family `P_k^{(alpha,beta)}`
//! under the affine map `x = 2 theta / tau + 1` sending `[-tau, 0]` onto
//! `[-1, 1]`. The named kinds fix the weight exponents and the classical
//! normalization:
//!
//! * Chebyshev (first kind):  `alpha = beta = -1/2`, scaled so
//!   `phi_k(0) = T_k(1) = 1`;
//! * Chebyshev (second kind): `alpha = beta = +1/2`, scaled so
//!   `phi_k(0) = U_k(1) = k + 1`;
//! * Legendre: `alpha = beta = 0`, classical `P_k(1) = 1`;
//! * general Jacobi: any `alpha, beta > -1`, classical normalization
//!   `P_k^{(alpha,beta)}(1) = binom(k + alpha, k)`.
//!
//! Values come from the three-term recurrence, derivatives from the exact
//! identity
//!
//! ```text
//! d^m/dx^m P_k^{(a,b)}(x)
//!     = [prod_{j=1..m} (k + a + b + j) / 2] * P_{k-m}^{(a+m, b+m)}(x),
//! ```
//!
//! and quadrature from the Golub-Welsch construction: the nodes are the
//! eigenvalues of the symmetric tridiagonal recurrence matrix, found here
//! by Sturm-count bisection plus Newton polish, and the weights come from
//! the Christoffel function `1 / sum_k p_k(x_i)^2` over the orthonormal
//! family. Bisection is bulletproof for tridiagonals of the sizes involved
//! and makes every rule reproducible bit for bit, which the discretization
//! layer relies on: inner products computed with the same node count agree
//! exactly between runs, so a smaller operator embeds in a larger one
//! without rounding drift.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest basis degree the evaluation and quadrature routines accept.
///
/// Far below any overflow threshold; the cap exists because discretization
/// orders beyond this are outside the regime the algorithms are validated
/// for (and convergence is exponential, so nobody needs them).
pub const DEGREE_CAP: usize = 64;

/// Weight family of the basis (the Jacobi exponents and the classical
/// normalization that goes with each named family).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisKind<T> {
    /// Chebyshev polynomials of the first kind, `T_k`.
    Chebyshev1,
    /// Chebyshev polynomials of the second kind, `U_k`.
    Chebyshev2,
    /// Legendre polynomials `P_k`.
    Legendre,
    /// General Jacobi family with weight `(1-x)^alpha (1+x)^beta`.
    Jacobi { alpha: T, beta: T },
}

impl<T: Scalar> BasisKind<T> {
    /// Jacobi exponent `alpha` of the weight `(1-x)^alpha (1+x)^beta`.
    pub fn alpha(&self) -> T {
        match self {
            BasisKind::Chebyshev1 => T::of(-0.5),
            BasisKind::Chebyshev2 => T::of(0.5),
            BasisKind::Legendre => T::zero(),
            BasisKind::Jacobi { alpha, .. } => *alpha,
        }
    }

    /// Jacobi exponent `beta`.
    pub fn beta(&self) -> T {
        match self {
            BasisKind::Chebyshev1 => T::of(-0.5),
            BasisKind::Chebyshev2 => T::of(0.5),
            BasisKind::Legendre => T::zero(),
            BasisKind::Jacobi { alpha: _, beta } => *beta,
        }
    }

    /// Whether the weight is symmetric about the interval midpoint
    /// (`alpha == beta`). Symmetric bases give rational approximants whose
    /// numerator and denominator are reflections of each other, hence unit
    /// modulus on the imaginary axis.
    pub fn is_symmetric(&self) -> bool {
        self.alpha() == self.beta()
    }

    /// Ratio of the classical normalization of this kind to the classical
    /// Jacobi normalization, for degrees `0..=n`.
    ///
    /// `phi_k = s_k * P_k^{(alpha,beta)}` with `s_k = 1` for Legendre and
    /// general Jacobi, `s_k = 1 / binom(k - 1/2, k)` for first-kind
    /// Chebyshev, and `s_k = (k + 1) / binom(k + 1/2, k)` for second kind.
    fn scale_factors(&self, n: usize) -> Vec<T> {
        let mut s = Vec::with_capacity(n + 1);
        match self {
            BasisKind::Chebyshev1 => {
                // binom(k - 1/2, k) obeys c_k = c_{k-1} (k - 1/2) / k.
                let mut c = T::one();
                s.push(T::one());
                for k in 1..=n {
                    let kf = T::of_usize(k);
                    c = c * (kf - T::of(0.5)) / kf;
                    s.push(T::one() / c);
                }
            }
            BasisKind::Chebyshev2 => {
                let mut c = T::one();
                s.push(T::one());
                for k in 1..=n {
                    let kf = T::of_usize(k);
                    c = c * (kf + T::of(0.5)) / kf;
                    s.push((kf + T::one()) / c);
                }
            }
            BasisKind::Legendre | BasisKind::Jacobi { .. } => {
                s.resize(n + 1, T::one());
            }
        }
        s
    }
}

/// A basis choice bound to a delay length: the family `phi_k` on
/// `[-tau, 0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec<T> {
    kind: BasisKind<T>,
    tau: T,
}

impl<T: Scalar> BasisSpec<T> {
    /// Validate and build a basis specification.
    ///
    /// Requires `tau > 0` and, for a general Jacobi kind, both exponents
    /// strictly greater than `-1` (otherwise the weight is not
    /// integrable).
    pub fn new(kind: BasisKind<T>, tau: T) -> Result<Self> {
        if !tau.is_finite() || tau <= T::zero() {
            return Err(Error::InvalidArgument {
                arg: "tau",
                reason: format!("delay must be finite and positive, got {tau}"),
            });
        }
        if let BasisKind::Jacobi { alpha, beta } = kind {
            if !alpha.is_finite() || alpha <= T::of(-1.0) {
                return Err(Error::InvalidArgument {
                    arg: "alpha",
                    reason: format!("Jacobi exponent must be finite and > -1, got {alpha}"),
                });
            }
            if !beta.is_finite() || beta <= T::of(-1.0) {
                return Err(Error::InvalidArgument {
                    arg: "beta",
                    reason: format!("Jacobi exponent must be finite and > -1, got {beta}"),
                });
            }
        }
        Ok(BasisSpec { kind, tau })
    }

    /// The polynomial family.
    pub fn kind(&self) -> BasisKind<T> {
        self.kind
    }

    /// The delay length (the basis lives on `[-tau, 0]`).
    pub fn tau(&self) -> T {
        self.tau
    }

    /// Map `theta in [-tau, 0]` to the reference coordinate
    /// `x in [-1, 1]`, rejecting points outside the interval (with a tiny
    /// slack for rounding in callers that build meshes arithmetically).
    fn x_of_theta(&self, theta: T) -> Result<T> {
        let slack = self.tau * T::eps().sqrt();
        if !theta.is_finite() || theta < -self.tau - slack || theta > slack {
            return Err(Error::InvalidArgument {
                arg: "theta",
                reason: format!(
                    "evaluation point {theta} lies outside [-{}, 0]",
                    self.tau
                ),
            });
        }
        Ok(T::of(2.0) * theta / self.tau + T::one())
    }
}

fn check_degree(k: usize) -> Result<()> {
    if k > DEGREE_CAP {
        return Err(Error::InvalidArgument {
            arg: "degree",
            reason: format!("degree {k} exceeds the supported cap {DEGREE_CAP}"),
        });
    }
    Ok(())
}

/// Classical Jacobi values `P_0^{(a,b)}(x) .. P_n^{(a,b)}(x)` by the
/// three-term recurrence. `P_1` is hardwired because the general recurrence
/// degenerates at `k = 1` when `a + b = -1` (the first-kind Chebyshev
/// case); from `k = 2` on the coefficients are bounded away from zero for
/// any `a, b > -1`.
fn jacobi_values<T: Scalar>(a: T, b: T, n: usize, x: T) -> Vec<T> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(T::one());
    if n == 0 {
        return p;
    }
    let half = T::of(0.5);
    p.push((a + b + T::of(2.0)) * half * x + (a - b) * half);
    let ab = a + b;
    for k in 2..=n {
        let kf = T::of_usize(k);
        let two_k_ab = T::of(2.0) * kf + ab;
        let b0 = T::of(2.0) * kf * (kf + ab) * (two_k_ab - T::of(2.0));
        let b1 = (two_k_ab - T::one()) * two_k_ab * (two_k_ab - T::of(2.0));
        let b2 = (two_k_ab - T::one()) * (a * a - b * b);
        let b3 = T::of(2.0) * (kf + a - T::one()) * (kf + b - T::one()) * two_k_ab;
        let val = ((b1 * x + b2) * p[k - 1] - b3 * p[k - 2]) / b0;
        p.push(val);
    }
    p
}

/// Values `phi_0(theta) .. phi_n(theta)` of the basis on `[-tau, 0]`.
pub fn eval_basis_all<T: Scalar>(spec: &BasisSpec<T>, n: usize, theta: T) -> Result<Vec<T>> {
    check_degree(n)?;
    let x = spec.x_of_theta(theta)?;
    let raw = jacobi_values(spec.kind.alpha(), spec.kind.beta(), n, x);
    let s = spec.kind.scale_factors(n);
    Ok(raw.into_iter().zip(s).map(|(p, sk)| sk * p).collect())
}

/// Value of a single basis function `phi_k(theta)`.
pub fn eval_basis<T: Scalar>(spec: &BasisSpec<T>, k: usize, theta: T) -> Result<T> {
    Ok(eval_basis_all(spec, k, theta)?[k])
}

/// Derivatives `phi_0^{(m)}(theta) .. phi_n^{(m)}(theta)`.
///
/// Uses the exact degree-lowering identity for Jacobi derivatives together
/// with the chain-rule factor `(2/tau)^m`; for `m > k` the derivative is
/// identically zero, and `phi_k^{(k)}` is the nonzero constant that the
/// rational-approximant construction divides by.
pub fn eval_basis_derivative_all<T: Scalar>(
    spec: &BasisSpec<T>,
    n: usize,
    m: usize,
    theta: T,
) -> Result<Vec<T>> {
    check_degree(n)?;
    if m == 0 {
        return eval_basis_all(spec, n, theta);
    }
    let x = spec.x_of_theta(theta)?;
    let a = spec.kind.alpha();
    let b = spec.kind.beta();
    let s = spec.kind.scale_factors(n);
    let chain = (T::of(2.0) / spec.tau).powi(m as i32);
    let mut out = vec![T::zero(); n + 1];
    if n < m {
        return Ok(out);
    }
    // Shifted-family values P_{k-m}^{(a+m, b+m)} for k = m..=n.
    let mf = T::of_usize(m);
    let shifted = jacobi_values(a + mf, b + mf, n - m, x);
    for k in m..=n {
        let kf = T::of_usize(k);
        let mut fac = T::one();
        for j in 1..=m {
            fac = fac * (kf + a + b + T::of_usize(j)) * T::of(0.5);
        }
        out[k] = s[k] * chain * fac * shifted[k - m];
    }
    Ok(out)
}

/// Derivative of a single basis function, `phi_k^{(m)}(theta)`.
pub fn eval_basis_derivative<T: Scalar>(
    spec: &BasisSpec<T>,
    k: usize,
    m: usize,
    theta: T,
) -> Result<T> {
    Ok(eval_basis_derivative_all(spec, k, m, theta)?[k])
}

/// Weight function of the basis at a point of `[-tau, 0]`, i.e.
/// `(1 - x)^alpha (1 + x)^beta` at `x = 2 theta / tau + 1`.
pub fn weight<T: Scalar>(spec: &BasisSpec<T>, theta: T) -> Result<T> {
    let x = spec.x_of_theta(theta)?;
    let a = spec.kind.alpha();
    let b = spec.kind.beta();
    Ok((T::one() - x).powf(a) * (T::one() + x).powf(b))
}

/// Natural logarithm of the gamma function for positive arguments
/// (Lanczos approximation, `g = 7`, nine coefficients; relative error well
/// below `1e-13` over the range used here).
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    const G: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    fn lg(x: f64) -> f64 {
        if x < 0.5 {
            // Reflection keeps the Lanczos series in its accurate range.
            std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().abs().ln() - lg(1.0 - x)
        } else {
            let x = x - 1.0;
            let mut acc = G[0];
            for (i, &c) in G.iter().enumerate().skip(1) {
                acc += c / (x + i as f64);
            }
            let t = x + 7.5;
            0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
        }
    }
    T::of(lg(x.as_f64()))
}

/// Total mass of the weight on the reference interval,
/// `mu_0 = int_{-1}^{1} (1-x)^alpha (1+x)^beta dx`.
fn reference_mass<T: Scalar>(kind: &BasisKind<T>) -> T {
    let pi = T::of(std::f64::consts::PI);
    match kind {
        BasisKind::Chebyshev1 => pi,
        BasisKind::Chebyshev2 => pi * T::of(0.5),
        BasisKind::Legendre => T::of(2.0),
        BasisKind::Jacobi { alpha, beta } => {
            let a = *alpha;
            let b = *beta;
            let ln_mass = (a + b + T::one()) * T::of(std::f64::consts::LN_2)
                + ln_gamma(a + T::one())
                + ln_gamma(b + T::one())
                - ln_gamma(a + b + T::of(2.0));
            ln_mass.exp()
        }
    }
}

/// Coefficients of the symmetric tridiagonal (orthonormal-basis) Jacobi
/// matrix: diagonal `a_0..a_{m-1}` and off-diagonal `b_1..b_m` (returned
/// with a leading unused zero so `off[k]` is `b_k`).
fn jacobi_tridiag<T: Scalar>(alpha: T, beta: T, m: usize) -> (Vec<T>, Vec<T>) {
    let ab = alpha + beta;
    let mut diag = Vec::with_capacity(m);
    let mut off = vec![T::zero(); m + 1];
    for k in 0..m {
        if k == 0 {
            diag.push((beta - alpha) / (ab + T::of(2.0)));
        } else {
            let kf = T::of_usize(k);
            let t = T::of(2.0) * kf + ab;
            diag.push((beta * beta - alpha * alpha) / (t * (t + T::of(2.0))));
        }
    }
    for (k, slot) in off.iter_mut().enumerate().take(m + 1).skip(1) {
        let sq = if k == 1 {
            // The general expression is 0/0 at k = 1 when a + b = -1.
            T::of(4.0) * (T::one() + alpha) * (T::one() + beta)
                / ((ab + T::of(2.0)) * (ab + T::of(2.0)) * (ab + T::of(3.0)))
        } else {
            let kf = T::of_usize(k);
            let t = T::of(2.0) * kf + ab;
            T::of(4.0) * kf * (kf + alpha) * (kf + beta) * (kf + ab)
                / (t * t * (t + T::one()) * (t - T::one()))
        };
        *slot = sq.sqrt();
    }
    (diag, off)
}

/// Number of eigenvalues of the tridiagonal strictly below `x` (Sturm
/// count via the LDL recurrence).
fn sturm_count<T: Scalar>(diag: &[T], off: &[T], x: T) -> usize {
    let tiny = T::min_positive_value().sqrt();
    let mut count = 0usize;
    let mut d = T::one();
    for (k, &a) in diag.iter().enumerate() {
        let coupling = if k == 0 {
            T::zero()
        } else {
            off[k] * off[k] / d
        };
        d = a - x - coupling;
        if d < T::zero() {
            count += 1;
        } else if d == T::zero() {
            d = -tiny;
            count += 1;
        }
    }
    count
}

/// Orthonormal-polynomial value and derivative at `x` (degree `m`, using
/// `off[1..=m]`). Returns `(p_m, p_m', values p_0..p_{m-1})` so callers can
/// reuse the Christoffel sum.
fn orthonormal_eval<T: Scalar>(
    diag: &[T],
    off: &[T],
    mass: T,
    m: usize,
    x: T,
) -> (T, T, Vec<T>) {
    let mut vals = Vec::with_capacity(m);
    let mut p_prev = T::zero();
    let mut p = T::one() / mass.sqrt();
    let mut dp_prev = T::zero();
    let mut dp = T::zero();
    for k in 0..m {
        vals.push(p);
        let p_next = ((x - diag[k]) * p - off[k] * p_prev) / off[k + 1];
        let dp_next = (p + (x - diag[k]) * dp - off[k] * dp_prev) / off[k + 1];
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp, vals)
}

/// Gauss quadrature nodes and weights on `[-tau, 0]` for the weight of the
/// basis: `sum_i w_i f(theta_i)` matches
/// `int_{-tau}^{0} f(theta) w(theta) dtheta` exactly for polynomials of
/// degree up to `2m - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    /// Nodes in ascending order, strictly inside `(-tau, 0)`.
    pub nodes: Vec<T>,
    /// Positive weights, one per node.
    pub weights: Vec<T>,
}

impl<T: Scalar> QuadratureRule<T> {
    /// Apply the rule to a function of `theta`.
    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .fold(T::zero(), |acc, v| acc + v)
    }
}

/// Zeros of the degree-`m` orthonormal polynomial on the reference
/// interval, ascending: the Gauss nodes before mapping to `[-tau, 0]`.
fn jacobi_zeros_x<T: Scalar>(alpha: T, beta: T, m: usize) -> Result<Vec<T>> {
    let (diag, off) = jacobi_tridiag(alpha, beta, m);
    // Gershgorin bounds for the tridiagonal spectrum.
    let mut lo = T::max_value();
    let mut hi = -T::max_value();
    for k in 0..m {
        let r = off[k].abs() + if k + 1 < m { off[k + 1].abs() } else { T::zero() };
        lo = lo.min(diag[k] - r);
        hi = hi.max(diag[k] + r);
    }
    let width_tol = T::eps() * T::of(4.0) * (T::one() + hi.abs().max(lo.abs()));
    let mass = T::one(); // the count and polish steps do not depend on mass
    let mut zeros = Vec::with_capacity(m);
    for i in 0..m {
        let mut a = lo;
        let mut b = hi;
        for _ in 0..200 {
            if b - a <= width_tol {
                break;
            }
            let mid = (a + b) * T::of(0.5);
            if sturm_count(&diag, &off, mid) >= i + 1 {
                b = mid;
            } else {
                a = mid;
            }
        }
        let mut x = (a + b) * T::of(0.5);
        for _ in 0..2 {
            let (p, dp, _) = orthonormal_eval(&diag, &off, mass, m, x);
            if dp != T::zero() {
                let step = p / dp;
                let xn = x - step;
                if xn > a && xn < b {
                    x = xn;
                }
            }
        }
        zeros.push(x);
    }
    // Structural sanity: nodes strictly ascending and inside (-1, 1).
    let margin = T::of(1e-6);
    for (i, &z) in zeros.iter().enumerate() {
        if z <= -T::one() - margin || z >= T::one() + margin {
            return Err(Error::Numerical {
                op: "jacobi_zeros",
                detail: format!("node {z} escaped the reference interval"),
            });
        }
        if i > 0 && z <= zeros[i - 1] {
            return Err(Error::Numerical {
                op: "jacobi_zeros",
                detail: "nodes failed to separate".into(),
            });
        }
    }
    Ok(zeros)
}

/// Build the `m`-point Gauss rule for the basis weight on `[-tau, 0]`.
pub fn gauss_rule<T: Scalar>(spec: &BasisSpec<T>, m: usize) -> Result<QuadratureRule<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument {
            arg: "points",
            reason: "a quadrature rule needs at least one node".into(),
        });
    }
    if m > DEGREE_CAP + 2 {
        return Err(Error::InvalidArgument {
            arg: "points",
            reason: format!("rule size {m} exceeds the supported cap {}", DEGREE_CAP + 2),
        });
    }
    let alpha = spec.kind.alpha();
    let beta = spec.kind.beta();
    let xs = jacobi_zeros_x(alpha, beta, m)?;
    let (diag, off) = jacobi_tridiag(alpha, beta, m);
    let mass = reference_mass(&spec.kind);
    let half_tau = spec.tau * T::of(0.5);
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for &x in &xs {
        let (_, _, vals) = orthonormal_eval(&diag, &off, mass, m, x);
        let chris: T = vals.iter().map(|&v| v * v).fold(T::zero(), |a, v| a + v);
        nodes.push(half_tau * (x - T::one()));
        weights.push(half_tau / chris);
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Zeros of `phi_k` on `[-tau, 0]`, ascending (`k = 0` has none).
pub fn basis_zeros<T: Scalar>(spec: &BasisSpec<T>, k: usize) -> Result<Vec<T>> {
    check_degree(k)?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let xs = jacobi_zeros_x(spec.kind.alpha(), spec.kind.beta(), k)?;
    let half_tau = spec.tau * T::of(0.5);
    Ok(xs.into_iter().map(|x| half_tau * (x - T::one())).collect())
}

/// Squared weighted norm `||phi_j||^2 = int phi_j(theta)^2 w dtheta`,
/// computed with a `j + 2`-point rule (exact for the degree-`2j`
/// integrand, with one node to spare).
pub fn norm_squared<T: Scalar>(spec: &BasisSpec<T>, j: usize) -> Result<T> {
    check_degree(j)?;
    let rule = gauss_rule(spec, j + 2)?;
    let mut acc = T::zero();
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = eval_basis(spec, j, t)?;
        acc += w * v * v;
    }
    Ok(acc)
}
