//! Rational approximation of the delay exponential, and the transfer
//! functions built from it.
//!
//! Solving the weak-form equations for a pure delay line (no dynamics,
//! unit boundary value) gives a rational function of the Laplace variable,
//!
//! ```text
//! r_N(s, theta) = sum_k phi_N^(N-k)(theta) s^k / sum_k phi_N^(N-k)(0) s^k,
//! ```
//!
//! which approximates `e^{s theta}` on the delay interval. Its value at
//! `theta = -tau` substitutes for the delay exponential in the transfer
//! function: the order-`N` realization satisfies
//!
//! ```text
//! G_N(s) = C (sI - A0 - A1 r_N(s, -tau))^{-1} B,
//! ```
//!
//! so the quality of the reduced model is exactly the quality of `r_N` as
//! an approximation of `e^{-s tau}`. For the Legendre basis `r_N(s, -tau)`
//! is the diagonal Pade approximant of the exponential; for symmetric
//! bases generally (equal Jacobi exponents) it is all-pass, matching
//! `|e^{i omega theta}| = 1` exactly on the imaginary axis.
//!
//! The module provides the explicit coefficient construction, an
//! independent linear-solve evaluation, the collocation counterpart, the
//! exact/reduced/state-space transfer functions, and the moment defects
//! `n! t_n - (-tau)^n` that quantify how many Taylor coefficients of the
//! delay exponential are matched (`2N` of them for symmetric bases, by
//! the Pade property).

use num_complex::Complex;

use crate::discretize::{
    barycentric_weights, lagrange_diff_rows, lagrange_values_at, CollocationMesh, DelaySystem,
    Realization,
};
use crate::error::{Error, Result};
use crate::numerics::{lu_factor, Mat};
use crate::orthopoly::{eval_basis_all, eval_basis_derivative_all, BasisSpec};
use crate::scalar::Scalar;

/// Denominator magnitudes below this multiple of the coefficient norm are
/// treated as evaluation at a pole.
pub const POLE_GUARD_TOL: f64 = 1e-12;

/// A real-coefficient rational function of one complex variable, stored
/// as ascending power coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction<T> {
    /// Numerator coefficients, constant term first.
    pub num: Vec<T>,
    /// Denominator coefficients, constant term first.
    pub den: Vec<T>,
}

fn horner<T: Scalar>(coeffs: &[T], s: Complex<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for &c in coeffs.iter().rev() {
        acc = acc * s + Complex::new(c, T::zero());
    }
    acc
}

impl<T: Scalar> RationalFunction<T> {
    /// Evaluate at a complex point. Points where the denominator falls
    /// below [`POLE_GUARD_TOL`] times the coefficient norm are rejected
    /// as poles.
    pub fn eval(&self, s: Complex<T>) -> Result<Complex<T>> {
        let den = horner(&self.den, s);
        let scale = self
            .den
            .iter()
            .fold(T::zero(), |acc, &c| acc + c * c)
            .sqrt();
        let threshold = T::of(POLE_GUARD_TOL) * scale;
        if den.norm() < threshold {
            return Err(Error::PoleProximity {
                magnitude: den.norm().as_f64(),
                threshold: threshold.as_f64(),
            });
        }
        Ok(horner(&self.num, s) / den)
    }

    /// Degree of the denominator (and numerator) polynomial.
    pub fn degree(&self) -> usize {
        self.den.len().saturating_sub(1)
    }
}

/// Closed-form coefficients of `r_N(s, theta)`: the `k`-th power of `s`
/// carries the `(N-k)`-th derivative of the top basis function, evaluated
/// at `theta` in the numerator and at the origin in the denominator.
pub fn rn_explicit<T: Scalar>(
    spec: &BasisSpec<T>,
    n_deg: usize,
    theta: T,
) -> Result<RationalFunction<T>> {
    if n_deg == 0 {
        return Err(Error::InvalidArgument {
            arg: "degree",
            reason: "the rational approximant needs degree N >= 1".into(),
        });
    }
    let mut num = vec![T::zero(); n_deg + 1];
    let mut den = vec![T::zero(); n_deg + 1];
    for m in 0..=n_deg {
        num[n_deg - m] = eval_basis_derivative_all(spec, n_deg, m, theta)?[n_deg];
        den[n_deg - m] = eval_basis_derivative_all(spec, n_deg, m, T::zero())?[n_deg];
    }
    Ok(RationalFunction { num, den })
}

/// Evaluate `r_N(s, theta)` by solving the defining linear system
/// directly: the boundary row forces the value one at the origin and the
/// remaining rows impose `s x_j = (D x)_j`. This shares no code with the
/// closed form, which is what makes the two usable as mutual checks.
pub fn rn_eval_solve<T: Scalar>(
    spec: &BasisSpec<T>,
    n_deg: usize,
    theta: T,
    s: Complex<T>,
) -> Result<Complex<T>> {
    if n_deg == 0 {
        return Err(Error::InvalidArgument {
            arg: "degree",
            reason: "the rational approximant needs degree N >= 1".into(),
        });
    }
    let row0 = eval_basis_all(spec, n_deg, T::zero())?;
    let d = crate::discretize::diff_matrix(spec, n_deg)?;
    let dim = n_deg + 1;
    let mut m = Mat::<Complex<T>>::zeros(dim, dim);
    for k in 0..dim {
        m[(0, k)] = Complex::new(row0[k], T::zero());
    }
    for j in 0..n_deg {
        for k in 0..dim {
            let delta = if j == k { s } else { Complex::new(T::zero(), T::zero()) };
            m[(1 + j, k)] = delta - Complex::new(d[(j, k)], T::zero());
        }
    }
    let mut rhs = Mat::<Complex<T>>::zeros(dim, 1);
    rhs[(0, 0)] = Complex::new(T::one(), T::zero());
    let x = lu_factor(&m, "rn_eval_solve")?.solve(&rhs)?;
    let vals = eval_basis_all(spec, n_deg, theta)?;
    let mut acc = Complex::new(T::zero(), T::zero());
    for k in 0..dim {
        acc += x[(k, 0)] * Complex::new(vals[k], T::zero());
    }
    Ok(acc)
}

/// Collocation counterpart of the delay-exponential approximation: the
/// interpolant through the mesh values `p_k` with `p(0) = 1` and
/// `p'(theta_j) = s p(theta_j)` at the first `N` mesh points, evaluated
/// at `theta`.
pub fn pn_collocation<T: Scalar>(
    mesh: &CollocationMesh<T>,
    s: Complex<T>,
    theta: T,
) -> Result<Complex<T>> {
    let pts = mesh.points();
    let n_deg = mesh.degree();
    let w = barycentric_weights(pts);
    let dm = lagrange_diff_rows(pts, &w);
    let zero = Complex::new(T::zero(), T::zero());
    let mut m = Mat::<Complex<T>>::zeros(n_deg, n_deg);
    let mut rhs = Mat::<Complex<T>>::zeros(n_deg, 1);
    for j in 0..n_deg {
        for k in 0..n_deg {
            let delta = if j == k { s } else { zero };
            m[(j, k)] = Complex::new(dm[(j, k)], T::zero()) - delta;
        }
        rhs[(j, 0)] = -Complex::new(dm[(j, n_deg)], T::zero());
    }
    let p = lu_factor(&m, "pn_collocation")?.solve(&rhs)?;
    let card = lagrange_values_at(pts, &w, theta);
    let mut acc = Complex::new(card[n_deg], T::zero());
    for k in 0..n_deg {
        acc += p[(k, 0)] * Complex::new(card[k], T::zero());
    }
    Ok(acc)
}

fn complex_shift_solve<T: Scalar>(
    m: Mat<Complex<T>>,
    b: &Mat<T>,
    c: &Mat<T>,
    op: &'static str,
) -> Result<Mat<Complex<T>>> {
    let lu = lu_factor(&m, op).map_err(|e| match e {
        Error::Singular { pivot, .. } => Error::CharacteristicRootProximity { pivot },
        other => other,
    })?;
    let x = lu.solve(&b.to_complex())?;
    Ok(c.to_complex().matmul(&x))
}

/// The true transfer function `C (sI - A0 - A1 e^{-s tau})^{-1} B`.
/// Evaluation at a characteristic root is rejected.
pub fn tf_exact<T: Scalar>(sys: &DelaySystem<T>, s: Complex<T>) -> Result<Mat<Complex<T>>> {
    let n = sys.state_dim();
    let decay = (-s * Complex::new(sys.tau(), T::zero())).exp();
    let mut m = Mat::<Complex<T>>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { s } else { Complex::new(T::zero(), T::zero()) };
            m[(i, j)] = delta
                - Complex::new(sys.a0()[(i, j)], T::zero())
                - Complex::new(sys.a1()[(i, j)], T::zero()) * decay;
        }
    }
    complex_shift_solve(m, sys.b(), sys.c(), "tf_exact")
}

/// Transfer function with the delay exponential replaced by a supplied
/// value (normally `r_N(s, -tau)`):
/// `C (sI - A0 - A1 r)^{-1} B`.
pub fn tf_reduced<T: Scalar>(
    sys: &DelaySystem<T>,
    r_value: Complex<T>,
    s: Complex<T>,
) -> Result<Mat<Complex<T>>> {
    let n = sys.state_dim();
    let mut m = Mat::<Complex<T>>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { s } else { Complex::new(T::zero(), T::zero()) };
            m[(i, j)] = delta
                - Complex::new(sys.a0()[(i, j)], T::zero())
                - Complex::new(sys.a1()[(i, j)], T::zero()) * r_value;
        }
    }
    complex_shift_solve(m, sys.b(), sys.c(), "tf_reduced")
}

/// Transfer function of a realization: `Cm (sE - A)^{-1} Bm`, with
/// `E = None` meaning the identity.
pub fn tf_state_space<T: Scalar>(
    e: Option<&Mat<T>>,
    a: &Mat<T>,
    bm: &Mat<T>,
    cm: &Mat<T>,
    s: Complex<T>,
) -> Result<Mat<Complex<T>>> {
    let dim = a.rows();
    let mut m = Mat::<Complex<T>>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let e_entry = match e {
                Some(e) => e[(i, j)],
                None => {
                    if i == j {
                        T::one()
                    } else {
                        T::zero()
                    }
                }
            };
            m[(i, j)] = s * Complex::new(e_entry, T::zero()) - Complex::new(a[(i, j)], T::zero());
        }
    }
    complex_shift_solve(m, bm, cm, "tf_state_space")
}

/// Transfer function of any realization at a point.
pub fn tf_of<T: Scalar, R: Realization<T>>(r: &R, s: Complex<T>) -> Result<Mat<Complex<T>>> {
    tf_state_space(r.e(), r.a(), r.bm(), r.cm(), s)
}

/// Factorial as a scalar (exact up to the representable range; degrees
/// here stay far below it).
pub fn factorial<T: Scalar>(n: usize) -> T {
    let mut acc = T::one();
    for k in 2..=n {
        acc = acc * T::of_usize(k);
    }
    acc
}

/// Sum with Neumaier's compensated correction: the running error of each
/// addition is accumulated separately and folded in at the end.
fn compensated_sum<T: Scalar>(terms: impl Iterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Moment defects of the delay-exponential approximant at `theta = -tau`:
/// entry `n` is `n! t_n - (-tau)^n`, where `t_n` is the `n`-th Taylor
/// coefficient of `r_N(s, -tau)` at `s = 0`. A vanishing entry means the
/// approximant reproduces that Taylor coefficient of `e^{-s tau}`.
///
/// The Taylor coefficients come from long division of the coefficient
/// series, with compensated summation to keep cancellation in the
/// recursion from contaminating the small high-order defects.
pub fn pade_moment_defect<T: Scalar>(
    spec: &BasisSpec<T>,
    n_deg: usize,
    n_max: usize,
) -> Result<Vec<T>> {
    let r = rn_explicit(spec, n_deg, -spec.tau())?;
    let den0 = r.den[0];
    if den0 == T::zero() {
        return Err(Error::Numerical {
            op: "pade_moment_defect",
            detail: "constant denominator coefficient vanished".into(),
        });
    }
    let mut taylor: Vec<T> = Vec::with_capacity(n_max + 1);
    for j in 0..=n_max {
        let num_j = if j < r.num.len() { r.num[j] } else { T::zero() };
        let correction = compensated_sum((1..=j.min(r.den.len() - 1)).map(|i| {
            -r.den[i] * taylor[j - i]
        }));
        taylor.push((num_j + correction) / den0);
    }
    let tau = spec.tau();
    let mut defects = Vec::with_capacity(n_max + 1);
    let mut minus_tau_pow = T::one();
    for (n, &t_n) in taylor.iter().enumerate() {
        defects.push(factorial::<T>(n) * t_n - minus_tau_pow);
        minus_tau_pow = minus_tau_pow * (-tau);
    }
    Ok(defects)
}

/// Modulus of the approximant on the imaginary axis at the far end of the
/// delay interval, `|r_N(i omega, -tau)|`. Symmetric bases make this
/// exactly one (the approximant is all-pass); asymmetric Jacobi weights
/// break the property.
pub fn rn_boundary_modulus<T: Scalar>(spec: &BasisSpec<T>, n_deg: usize, omega: T) -> Result<T> {
    let r = rn_explicit(spec, n_deg, -spec.tau())?;
    Ok(r.eval(Complex::new(T::zero(), omega))?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{build_tau, chebyshev_extremal_mesh};
    use crate::orthopoly::BasisKind;

    fn leg(tau: f64) -> BasisSpec<f64> {
        BasisSpec::new(BasisKind::Legendre, tau).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn diagonal_pade_first_order() {
        let r = rn_explicit(&leg(1.0), 1, -1.0).unwrap();
        assert_eq!(r.num.len(), 2);
        // (2 - s) / (2 + s).
        assert!((r.num[0] - 2.0).abs() < 1e-12);
        assert!((r.num[1] + 1.0).abs() < 1e-12);
        assert!((r.den[0] - 2.0).abs() < 1e-12);
        assert!((r.den[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_pade_second_order() {
        let r = rn_explicit(&leg(1.0), 2, -1.0).unwrap();
        // (12 - 6s + s^2) / (12 + 6s + s^2).
        let want_num = [12.0, -6.0, 1.0];
        let want_den = [12.0, 6.0, 1.0];
        for k in 0..3 {
            assert!((r.num[k] - want_num[k]).abs() < 1e-11, "num[{k}] = {}", r.num[k]);
            assert!((r.den[k] - want_den[k]).abs() < 1e-11, "den[{k}] = {}", r.den[k]);
        }
    }

    #[test]
    fn value_at_origin_is_one() {
        for kind in [
            BasisKind::Chebyshev1,
            BasisKind::Chebyshev2,
            BasisKind::Legendre,
            BasisKind::Jacobi { alpha: -0.5, beta: -0.75 },
        ] {
            let spec = BasisSpec::<f64>::new(kind, 0.7).unwrap();
            for n in [1, 3, 6] {
                for theta in [-0.7, -0.35, 0.0] {
                    let r = rn_explicit(&spec, n, theta).unwrap();
                    let v = r.eval(c(0.0, 0.0)).unwrap();
                    assert!((v - c(1.0, 0.0)).norm() < 1e-12, "{kind:?} N={n} theta={theta}");
                }
            }
        }
    }

    #[test]
    fn explicit_matches_solve() {
        let points = [c(0.4, 1.3), c(-0.8, 0.0), c(0.0, 2.0), c(1.5, -0.5)];
        for kind in [
            BasisKind::Chebyshev1,
            BasisKind::Chebyshev2,
            BasisKind::Legendre,
            BasisKind::Jacobi { alpha: 0.25, beta: -0.4 },
        ] {
            let spec = BasisSpec::<f64>::new(kind, 1.2).unwrap();
            for n in [1, 4, 7] {
                for theta in [-1.2, -0.4, 0.0] {
                    for &s in &points {
                        let explicit = rn_explicit(&spec, n, theta).unwrap().eval(s).unwrap();
                        let solved = rn_eval_solve(&spec, n, theta, s).unwrap();
                        assert!(
                            (explicit - solved).norm() < 1e-9 * (1.0 + explicit.norm()),
                            "{kind:?} N={n} theta={theta} s={s}: {explicit} vs {solved}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn symmetric_bases_reflect() {
        // r(s) r(-s) = 1 at theta = -tau for symmetric weights.
        let s = c(0.3, 0.9);
        for kind in [BasisKind::Chebyshev1, BasisKind::Chebyshev2, BasisKind::Legendre] {
            let spec = BasisSpec::<f64>::new(kind, 1.0).unwrap();
            for n in [1, 2, 5, 8] {
                let r = rn_explicit(&spec, n, -1.0).unwrap();
                let prod = r.eval(s).unwrap() * r.eval(-s).unwrap();
                assert!((prod - c(1.0, 0.0)).norm() < 1e-11, "{kind:?} N={n}");
            }
        }
    }

    #[test]
    fn boundary_modulus_allpass_for_symmetric_weights() {
        let spec = BasisSpec::<f64>::new(BasisKind::Chebyshev2, 1.0).unwrap();
        for omega in [-20.0, -3.0, 0.0, 0.7, 15.0] {
            let m = rn_boundary_modulus(&spec, 5, omega).unwrap();
            assert!((m - 1.0).abs() < 1e-12, "omega={omega}: {m}");
        }
        // An asymmetric weight is visibly not all-pass.
        let asym = BasisSpec::<f64>::new(
            BasisKind::Jacobi { alpha: -0.5, beta: -0.75 },
            1.0,
        )
        .unwrap();
        let mut worst = 0.0f64;
        for k in 0..=200 {
            let omega = -50.0 + 0.5 * k as f64;
            let m = rn_boundary_modulus(&asym, 4, omega).unwrap();
            worst = worst.max((m - 1.0).abs());
        }
        assert!(worst > 1e-3, "asymmetric weight stayed all-pass: {worst}");
    }

    #[test]
    fn collocation_interpolant_worked_example() {
        let mesh = CollocationMesh::new(vec![-0.5, 0.0], 1.0).unwrap();
        let v = pn_collocation(&mesh, c(1.0, 0.0), -1.0).unwrap();
        assert!((v - c(1.0 / 3.0, 0.0)).norm() < 1e-13, "{v}");
    }

    #[test]
    fn collocation_interpolant_is_one_at_origin() {
        let mesh = chebyshev_extremal_mesh(1.5, 6).unwrap();
        let v = pn_collocation(&mesh, c(0.4, -1.1), 0.0).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn pole_guard_triggers() {
        let r = RationalFunction { num: vec![1.0], den: vec![1.0, 1.0] };
        assert!(matches!(
            r.eval(c(-1.0, 0.0)),
            Err(Error::PoleProximity { .. })
        ));
        assert!(r.eval(c(0.0, 0.0)).is_ok());
    }

    #[test]
    fn moment_defects_match_pade_order() {
        // Degree N matches 2N Taylor coefficients; the first miss has the
        // classical magnitude (N!)^2 tau^(2N+1) / (2N)!.
        for n in 1..=3usize {
            let defects = pade_moment_defect(&leg(1.0), n, 2 * n + 1).unwrap();
            for (j, &d) in defects.iter().enumerate().take(2 * n + 1) {
                let bound = 1e-12 * factorial::<f64>(j);
                assert!(d.abs() <= bound, "N={n} defect({j}) = {d:e}");
            }
            let first_miss = defects[2 * n + 1].abs();
            let classical =
                factorial::<f64>(n).powi(2) / factorial::<f64>(2 * n);
            assert!(
                (first_miss - classical).abs() < 1e-9 * classical,
                "N={n}: {first_miss} vs {classical}"
            );
        }
    }

    #[test]
    fn exact_transfer_function_scalar() {
        let sys = DelaySystem::scalar(-1.0, -1.0, 1.0, 1.0, 1.0).unwrap();
        let s = c(0.5, 1.0);
        let g = tf_exact(&sys, s).unwrap();
        let want = c(1.0, 0.0) / (s + c(1.0, 0.0) + (-s).exp());
        assert!((g[(0, 0)] - want).norm() < 1e-14);
        // At s = 0 the value is 1 / (0 + 1 + 1) = 0.5.
        let g0 = tf_exact(&sys, c(0.0, 0.0)).unwrap();
        assert!((g0[(0, 0)] - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn realization_transfer_matches_reduced_form() {
        // The pencil realization's transfer function equals the reduced
        // transfer function evaluated with r_N(s, -tau).
        let sys = DelaySystem::scalar(-1.0, -0.5, 2.0, 1.5, 1.0).unwrap();
        let spec = leg(1.0);
        for n in [1, 3, 6] {
            let real = build_tau(&sys, &spec, n).unwrap();
            for &s in &[c(0.0, 0.0), c(0.7, 0.4), c(-0.2, 2.0)] {
                let g_real = tf_of(&real, s).unwrap();
                let r_val = rn_explicit(&spec, n, -1.0).unwrap().eval(s).unwrap();
                let g_red = tf_reduced(&sys, r_val, s).unwrap();
                assert!(
                    (g_real[(0, 0)] - g_red[(0, 0)]).norm() < 1e-11,
                    "N={n} s={s}"
                );
            }
        }
    }

    #[test]
    fn transfer_at_characteristic_root_is_rejected() {
        // a0 = 0, a1 = 1, tau = ln 2 gives a characteristic root exactly
        // at s = ... s = a1 e^{-s tau}; try s real solving s = e^{-s ln2}.
        // Simpler: a0 = 1, a1 = 0 has a root at s = 1.
        let sys = DelaySystem::scalar(1.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            tf_exact(&sys, c(1.0, 0.0)),
            Err(Error::CharacteristicRootProximity { .. })
        ));
    }
}
