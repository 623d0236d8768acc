//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here is deliberately primitive: the oracles use only plain
//! floating-point arithmetic and textbook iterations, so agreement with
//! the library is evidence rather than tautology.

#![allow(dead_code)]

use delaytau::numerics::Mat;
use delaytau::{DelaySystem64, Mat64};
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic RNG for randomized checks. The seed can be overridden
/// through the `DELAYTAU_SEED` environment variable to reproduce a
/// failure or to fuzz across seeds in CI.
pub fn rng() -> ChaCha8Rng {
    let seed = std::env::var("DELAYTAU_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or(0x5EED_CAFE);
    ChaCha8Rng::seed_from_u64(seed)
}

/// Scalar delay system `x' = a x(t) + a x(t - tau)` with unit input and
/// output maps; stable for `a < 0` with a closed-form H2 norm.
pub fn hayes(a: f64, tau: f64) -> DelaySystem64 {
    DelaySystem64::scalar(a, a, 1.0, 1.0, tau).expect("valid scalar system")
}

/// Two-state delay system with identity input and output maps; the
/// standing nontrivial example used across the suites.
pub fn twostate() -> DelaySystem64 {
    let a0 = Mat64::from_rows(&[vec![-2.0, 1.0], vec![3.0, -8.0]]).unwrap();
    let a1 = Mat64::from_rows(&[vec![-1.0, -1.0], vec![-1.0, -1.0]]).unwrap();
    let eye = Mat64::identity(2);
    DelaySystem64::new(a0, a1, eye.clone(), eye, 1.0).expect("valid system")
}

/// Least-squares slope of `ln y` against `ln x`. Points with
/// non-positive `y` are dropped (they sit below the noise floor).
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|&(_, &y)| y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    assert!(pts.len() >= 3, "too few usable points for a slope fit");
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Uniformly random complex number in the disk of the given radius.
pub fn random_in_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex<f64> {
    loop {
        let re = rng.gen_range(-radius..radius);
        let im = rng.gen_range(-radius..radius);
        if re * re + im * im <= radius * radius {
            return Complex::new(re, im);
        }
    }
}

/// Random dense matrix with entries uniform in `[-scale, scale]`.
pub fn random_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Mat64 {
    Mat::from_fn(rows, cols, |_, _| rng.gen_range(-scale..scale))
}

/// Rightmost characteristic root of `s + e^{-s} = 0` with positive
/// imaginary part, computed by a plain Newton iteration on
/// `f(s) = s e^s + 1` (the equation multiplied through by `e^s`).
/// Shares no code with the library's refinement, which iterates on the
/// determinant of the characteristic matrix.
pub fn lambert_root_oracle() -> Complex<f64> {
    let mut s = Complex::new(-0.3, 1.3);
    for _ in 0..60 {
        let es = s.exp();
        let f = s * es + Complex::new(1.0, 0.0);
        let fp = es * (s + Complex::new(1.0, 0.0));
        let step = f / fp;
        s -= step;
        if step.norm() < 1e-15 {
            break;
        }
    }
    let check = s + (-s).exp();
    assert!(check.norm() < 1e-14, "oracle failed to converge: {check}");
    s
}

/// Double-exponential (tanh-sinh) quadrature of `f` over `(a, b)`.
/// Handles integrable endpoint singularities, which makes it a usable
/// independent check for weighted inner products of every basis family.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let h = 1.0 / 64.0;
    let steps = (4.0 / h) as i64;
    let mut total = 0.0;
    for i in -steps..=steps {
        let t = h * i as f64;
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let x = u.tanh();
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() / (u.cosh() * u.cosh());
        let point = mid + half * x;
        if point > a && point < b {
            let v = f(point);
            if v.is_finite() {
                total += w * v;
            }
        }
    }
    total * half * h
}

/// Double-exponential quadrature of `f(theta)` against the Jacobi
/// weight `(1-x)^alpha (1+x)^beta`, `x = 2 theta / tau + 1`, over
/// `(-tau, 0)`. The endpoint distances `1 - x` and `1 + x` are computed
/// from the exponential form of `tanh` rather than by subtraction, so
/// the weight singularities at the endpoints are evaluated to full
/// relative precision instead of the half precision a naive
/// substitution achieves. Independent of the library's weight and
/// quadrature code in every detail.
pub fn jacobi_weighted_integral(
    alpha: f64,
    beta: f64,
    tau: f64,
    f: impl Fn(f64) -> f64,
) -> f64 {
    let h = 1.0 / 64.0;
    let steps = (5.0 / h) as i64;
    let mut total = 0.0;
    for i in -steps..=steps {
        let t = h * i as f64;
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let e2u = (-2.0 * u.abs()).exp();
        // Distance to the endpoint the node approaches, and to the
        // opposite one, both well-conditioned.
        let near = 2.0 * e2u / (1.0 + e2u);
        let far = 2.0 / (1.0 + e2u);
        let (one_minus_x, one_plus_x) = if u >= 0.0 { (near, far) } else { (far, near) };
        let cosh_u = u.cosh();
        let wq = std::f64::consts::FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        let wj = (alpha * one_minus_x.ln() + beta * one_plus_x.ln()).exp();
        let theta = -0.5 * tau * one_minus_x;
        let term = wq * wj * f(theta);
        if term.is_finite() {
            total += term;
        }
    }
    total * 0.5 * tau * h
}

/// Relative error with a floor of one in the denominator, the scale
/// convention used throughout the tolerance checks.
pub fn rel_err(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1e-300)
}

/// Time-domain H2 oracle for a stable scalar delay system
/// `x'(t) = a0 x(t) + a1 x(t - tau)`, `x(0) = 1`, zero prehistory:
/// integrates the impulse response with a classical fourth-order
/// Runge-Kutta method of steps (history kept on a half-step grid so the
/// delayed stage values are always available) and accumulates the
/// energy with composite Simpson quadrature. Shares nothing with the
/// Lyapunov-equation route: no basis, no pencil, no linear solve.
pub fn dde_impulse_h2_oracle(a0: f64, a1: f64, tau: f64, horizon: f64) -> f64 {
    let steps_per_delay = 2000usize;
    let h = tau / steps_per_delay as f64;
    let half_per_delay = 2 * steps_per_delay;
    let total_steps = (horizon / h).ceil() as usize;
    // State samples on the half-step grid t = i h / 2.
    let mut hist: Vec<f64> = Vec::with_capacity(2 * total_steps + 2);
    hist.push(1.0);
    // The impulse puts a jump in the state at time zero, which the
    // delayed signal replays at time tau. A step that ends exactly at
    // the replay must integrate the dynamics from before the jump, so
    // its final stage reads the left limit; stages at the start of a
    // step propagate forward and read the right limit. Mixing these up
    // costs a full order of accuracy.
    let right = |hist: &[f64], idx: isize| -> f64 {
        if idx < 0 {
            0.0
        } else {
            hist[idx as usize]
        }
    };
    let left = |hist: &[f64], idx: isize| -> f64 {
        if idx <= 0 {
            0.0
        } else {
            hist[idx as usize]
        }
    };
    let mut x = 1.0f64;
    for step in 0..total_steps {
        let base = 2 * step as isize - half_per_delay as isize;
        let xd0 = right(&hist, base);
        let xd1 = right(&hist, base + 1);
        let xd2 = left(&hist, base + 2);
        let k1 = a0 * x + a1 * xd0;
        let k2 = a0 * (x + 0.5 * h * k1) + a1 * xd1;
        let k3 = a0 * (x + 0.5 * h * k2) + a1 * xd1;
        let k4 = a0 * (x + h * k3) + a1 * xd2;
        let x_next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        // Cubic Hermite midpoint fill so the next steps can read their
        // half-step delayed values at full order.
        let xp = a0 * x + a1 * xd0;
        let xp_next = a0 * x_next + a1 * xd2;
        let mid = 0.5 * (x + x_next) + h / 8.0 * (xp - xp_next);
        hist.push(mid);
        hist.push(x_next);
        x = x_next;
    }
    // Composite Simpson on the half-step grid (spacing h/2). The sample
    // count is odd by construction, so the pairing is exact.
    let m = hist.len() - 1;
    let mut energy = hist[0] * hist[0] + hist[m] * hist[m];
    for (i, v) in hist.iter().enumerate().skip(1).take(m - 1) {
        energy += v * v * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    energy *= 0.5 * h / 3.0;
    energy.sqrt()
}

/// Frequency-domain H2 oracle for the same scalar family: evaluates
/// `sqrt((1/pi) int_0^inf |G(i w)|^2 dw)` for
/// `G(s) = 1/(s - a0 - a1 e^{-s tau})` by composite Simpson over
/// `[0, 10^5]` plus the analytic `1/(pi X)` tail of the `1/w^2` decay
/// (the neglected corrections fall off like `1/X^3`). A third route to
/// the norm: no time stepping, no basis, no linear algebra.
pub fn scalar_freq_h2_oracle(a0: f64, a1: f64, tau: f64) -> f64 {
    let g2 = |w: f64| {
        let re = -a0 - a1 * (w * tau).cos();
        let im = w + a1 * (w * tau).sin();
        1.0 / (re * re + im * im)
    };
    let x_max = 1e5;
    let n = ((x_max / 0.02) as usize) | 1;
    let h = x_max / n as f64;
    let mut acc = g2(0.0) + g2(x_max);
    for i in 1..n {
        acc += g2(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let integral = acc * h / 3.0 + 1.0 / x_max;
    (integral / std::f64::consts::PI).sqrt()
}

/// Frobenius-norm relative gap between two complex matrices.
pub fn complex_gap(a: &Mat<Complex<f64>>, b: &Mat<Complex<f64>>) -> f64 {
    a.sub(b).frobenius() / (1.0 + b.frobenius())
}
