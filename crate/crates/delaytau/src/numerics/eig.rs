//! Dense nonsymmetric eigenvalue decomposition.
//!
//! The pipeline is the classical one: diagonal balancing, unitary reduction
//! to upper Hessenberg form, explicit single-shift QR iteration in complex
//! arithmetic until the matrix is triangular (a complex Schur form), then
//! eigenvector recovery by back substitution. Working in complex arithmetic
//! keeps every step a plain Givens/Householder sweep with no 2x2 real
//! blocks, at the cost of a constant factor that is irrelevant at the
//! matrix sizes this crate targets (a few hundred at most).

use super::lu::{lu_factor, solve_linear};
use super::mat::Mat;
use crate::error::{Error, Result};
use crate::scalar::{Entry, Scalar};
use num_complex::Complex;

/// Eigenvalues with per-eigenvalue residuals `‖A v − λ E v‖₂` (unit `v`).
///
/// Residuals travel with their eigenvalues through any reordering, so a
/// poorly determined eigenvalue can always be identified; nothing is
/// silently dropped.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    /// Eigenvalues sorted by descending real part (ties: descending
    /// imaginary part).
    pub eigenvalues: Vec<Complex<T>>,
    /// Residual of each eigenvalue, in the same order.
    pub residuals: Vec<T>,
}

impl<T: Scalar> Spectrum<T> {
    /// Largest real part; `None` for an empty spectrum.
    pub fn rightmost_real_part(&self) -> Option<T> {
        self.eigenvalues.first().map(|z| z.re)
    }

    /// Indices of eigenvalues whose residual exceeds `threshold`.
    pub fn flagged(&self, threshold: T) -> Vec<usize> {
        self.residuals
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > threshold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Full eigendecomposition of a real matrix: `F ≈ S diag(values) S⁻¹`
/// with eigenvector columns in `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T> {
    pub values: Vec<Complex<T>>,
    /// Column `k` is a unit eigenvector for `values[k]`.
    pub vectors: Mat<Complex<T>>,
}

/// Parlett–Reinsch balancing: replaces `f` by `D⁻¹ F D` with powers-of-two
/// diagonal `D` (exact in floating point) and returns the scale factors.
fn balance<T: Scalar>(f: &mut Mat<T>) -> Vec<T> {
    let n = f.rows();
    let radix = T::of(2.0);
    let mut d = vec![T::one(); n];
    for _pass in 0..100 {
        let mut converged = true;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c += f[(j, i)].abs();
                    r += f[(i, j)].abs();
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let s = c + r;
            let mut scale = T::one();
            let mut c2 = c;
            let mut r2 = r;
            while c2 < r2 / radix {
                c2 *= radix;
                r2 /= radix;
                scale *= radix;
            }
            while c2 >= r2 * radix {
                c2 /= radix;
                r2 *= radix;
                scale /= radix;
            }
            if c2 + r2 < T::of(0.95) * s && scale != T::one() {
                converged = false;
                d[i] *= scale;
                for j in 0..n {
                    f[(i, j)] = f[(i, j)] / scale;
                }
                for j in 0..n {
                    f[(j, i)] = f[(j, i)] * scale;
                }
            }
        }
        if converged {
            break;
        }
    }
    d
}

/// Unitary reduction to upper Hessenberg form by complex Householder
/// reflections; the accumulated unitary lands in `q` (`H = Qᴴ A Q`).
fn hessenberg<T: Scalar>(h: &mut Mat<Complex<T>>, q: &mut Mat<Complex<T>>) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let two = T::of(2.0);
    let mut v: Vec<Complex<T>> = vec![Complex::new(T::zero(), T::zero()); n];
    for k in 0..(n - 2) {
        // Column below the subdiagonal entry.
        let mut norm_sq = T::zero();
        for i in (k + 1)..n {
            let m = h[(i, k)].modulus();
            norm_sq += m * m;
        }
        let norm = norm_sq.sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.modulus() == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            x0.scale(T::one() / x0.modulus())
        };
        // alpha = -phase * norm avoids cancellation in v0 = x0 - alpha.
        let alpha = -phase.scale(norm);
        let mut vnorm_sq = T::zero();
        for i in (k + 1)..n {
            let vi = if i == k + 1 { h[(i, k)] - alpha } else { h[(i, k)] };
            let m = vi.modulus();
            vnorm_sq += m * m;
            v[i] = vi;
        }
        if vnorm_sq == T::zero() {
            continue;
        }
        let inv = T::one() / vnorm_sq.sqrt();
        for item in v.iter_mut().take(n).skip(k + 1) {
            *item = item.scale(inv);
        }
        // Left: rows k+1..n of columns k..n.
        for j in k..n {
            let mut s = Complex::new(T::zero(), T::zero());
            for i in (k + 1)..n {
                s += v[i].conj_entry() * h[(i, j)];
            }
            let s2 = s.scale(two);
            for i in (k + 1)..n {
                let d = v[i] * s2;
                h[(i, j)] -= d;
            }
        }
        // Right: columns k+1..n of all rows.
        for i in 0..n {
            let mut s = Complex::new(T::zero(), T::zero());
            for j in (k + 1)..n {
                s += h[(i, j)] * v[j];
            }
            let s2 = s.scale(two);
            for j in (k + 1)..n {
                let d = s2 * v[j].conj_entry();
                h[(i, j)] -= d;
            }
        }
        // Accumulate Q <- Q P.
        for i in 0..n {
            let mut s = Complex::new(T::zero(), T::zero());
            for j in (k + 1)..n {
                s += q[(i, j)] * v[j];
            }
            let s2 = s.scale(two);
            for j in (k + 1)..n {
                let d = s2 * v[j].conj_entry();
                q[(i, j)] -= d;
            }
        }
        // The reflection maps the column to alpha e1 exactly.
        h[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            h[(i, k)] = Complex::new(T::zero(), T::zero());
        }
    }
}

/// Complex Givens rotation `[c s; -s̄ c]` (real `c ≥ 0`) mapping `(f, g)` to
/// `(r, 0)`.
fn givens<T: Scalar>(f: Complex<T>, g: Complex<T>) -> (T, Complex<T>, Complex<T>) {
    let gm = g.modulus();
    if gm == T::zero() {
        return (T::one(), Complex::new(T::zero(), T::zero()), f);
    }
    let fm = f.modulus();
    if fm == T::zero() {
        let s = g.conj_entry().scale(T::one() / gm);
        return (T::zero(), s, Complex::new(gm, T::zero()));
    }
    let d = fm.hypot(gm);
    let c = fm / d;
    let fs = f.scale(T::one() / fm);
    let s = (fs * g.conj_entry()).scale(T::one() / d);
    let r = fs.scale(d);
    (c, s, r)
}

/// Wilkinson shift: the eigenvalue of the trailing 2x2 block closest to its
/// bottom-right entry.
fn wilkinson_shift<T: Scalar>(h: &Mat<Complex<T>>, hi: usize) -> Complex<T> {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half = T::of(0.5);
    let t = (a - d).scale(half);
    let disc = (t * t + b * c).sqrt();
    if (t - disc).modulus() <= (t + disc).modulus() {
        d + t - disc
    } else {
        d + t + disc
    }
}

/// One explicit shifted QR step `H − μI = QR`, `H ← RQ + μI` on the active
/// window, accumulating the unitary into `z`.
fn qr_step<T: Scalar>(
    h: &mut Mat<Complex<T>>,
    z: &mut Mat<Complex<T>>,
    lo: usize,
    hi: usize,
    mu: Complex<T>,
) {
    let n = h.rows();
    for i in lo..=hi {
        let d = h[(i, i)] - mu;
        h[(i, i)] = d;
    }
    let mut rots: Vec<(T, Complex<T>)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s, r) = givens(h[(k, k)], h[(k + 1, k)]);
        h[(k, k)] = r;
        h[(k + 1, k)] = Complex::new(T::zero(), T::zero());
        for j in (k + 1)..n {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = a.scale(c) + s * b;
            h[(k + 1, j)] = b.scale(c) - s.conj_entry() * a;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        let row_end = (k + 2).min(hi) + 1;
        for i in 0..row_end {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a.scale(c) + b * s.conj_entry();
            h[(i, k + 1)] = b.scale(c) - a * s;
        }
        for i in 0..n {
            let a = z[(i, k)];
            let b = z[(i, k + 1)];
            z[(i, k)] = a.scale(c) + b * s.conj_entry();
            z[(i, k + 1)] = b.scale(c) - a * s;
        }
    }
    for i in lo..=hi {
        let d = h[(i, i)] + mu;
        h[(i, i)] = d;
    }
}

/// Drive the Hessenberg matrix to (complex Schur) triangular form.
fn schur<T: Scalar>(h: &mut Mat<Complex<T>>, z: &mut Mat<Complex<T>>) -> Result<()> {
    let n = h.rows();
    if n <= 1 {
        return Ok(());
    }
    let hnorm = h.frobenius();
    if hnorm == T::zero() {
        return Ok(());
    }
    let eps = T::eps();
    let negligible = |h: &Mat<Complex<T>>, i: usize| -> bool {
        let local = h[(i - 1, i - 1)].modulus() + h[(i, i)].modulus();
        let thresh = if local > T::zero() { eps * local } else { eps * hnorm };
        h[(i, i - 1)].modulus() <= thresh
    };
    let mut hi = n - 1;
    let mut stall = 0usize;
    let mut total = 0usize;
    let budget = 60 * n;
    loop {
        while hi > 0 && negligible(h, hi) {
            h[(hi, hi - 1)] = Complex::new(T::zero(), T::zero());
            hi -= 1;
            stall = 0;
        }
        if hi == 0 {
            return Ok(());
        }
        let mut lo = hi;
        while lo > 0 {
            if negligible(h, lo) {
                h[(lo, lo - 1)] = Complex::new(T::zero(), T::zero());
                break;
            }
            lo -= 1;
        }
        total += 1;
        stall += 1;
        if total > budget {
            return Err(Error::NonConvergence {
                op: "shifted QR iteration",
                iterations: total,
            });
        }
        let mu = if stall % 16 == 0 {
            // Exceptional shift to break rare limit cycles.
            let mut extra = h[(hi, hi - 1)].modulus();
            if hi >= 2 {
                extra += h[(hi - 1, hi - 2)].modulus();
            }
            h[(hi, hi)] + Complex::new(T::of(0.75) * extra, T::zero())
        } else {
            wilkinson_shift(h, hi)
        };
        qr_step(h, z, lo, hi, mu);
    }
}

/// Eigenvectors of the triangular factor, rotated back through `z`.
fn triangular_eigenvectors<T: Scalar>(
    t: &Mat<Complex<T>>,
    z: &Mat<Complex<T>>,
) -> Mat<Complex<T>> {
    let n = t.rows();
    let tnorm = t.frobenius();
    let smallnum = if tnorm > T::zero() {
        T::eps() * tnorm
    } else {
        T::min_positive_value().sqrt()
    };
    let big = T::max_value().sqrt();
    let mut vecs = Mat::zeros(n, n);
    let mut y: Vec<Complex<T>> = vec![Complex::new(T::zero(), T::zero()); n];
    for k in 0..n {
        for item in y.iter_mut() {
            *item = Complex::new(T::zero(), T::zero());
        }
        y[k] = Complex::new(T::one(), T::zero());
        let lam = t[(k, k)];
        for j in (0..k).rev() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (m, &ym) in y.iter().enumerate().take(k + 1).skip(j + 1) {
                acc += t[(j, m)] * ym;
            }
            let mut den = t[(j, j)] - lam;
            if den.modulus() < smallnum {
                // Perturb repeated diagonal entries; the residual reported
                // downstream exposes any resulting inaccuracy.
                den = Complex::new(smallnum, T::zero());
            }
            y[j] = -acc / den;
            let m = y[j].modulus();
            if m > big {
                let inv = T::one() / m;
                for item in y.iter_mut().take(k + 1) {
                    *item = item.scale(inv);
                }
            }
        }
        for i in 0..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (m, &ym) in y.iter().enumerate().take(k + 1) {
                acc += z[(i, m)] * ym;
            }
            vecs[(i, k)] = acc;
        }
    }
    vecs
}

/// Full eigendecomposition of a real dense matrix.
pub fn eigen_dense<T: Scalar>(f: &Mat<T>) -> Result<EigenDecomposition<T>> {
    if !f.is_square() {
        return Err(Error::DimensionMismatch {
            op: "eigen_dense",
            detail: format!("matrix is {}x{}", f.rows(), f.cols()),
        });
    }
    let n = f.rows();
    let mut fb = f.clone();
    let d = balance(&mut fb);
    let mut h = fb.to_complex();
    let mut q = Mat::identity(n);
    hessenberg(&mut h, &mut q);
    schur(&mut h, &mut q)?;
    let values: Vec<Complex<T>> = (0..n).map(|i| h[(i, i)]).collect();
    let mut vectors = triangular_eigenvectors(&h, &q);
    // Undo the balancing similarity and renormalize each column.
    for k in 0..n {
        let mut norm_sq = T::zero();
        for i in 0..n {
            let scaled = vectors[(i, k)].scale(d[i]);
            vectors[(i, k)] = scaled;
            let m = scaled.modulus();
            norm_sq += m * m;
        }
        let norm = norm_sq.sqrt();
        if norm > T::zero() {
            let inv = T::one() / norm;
            for i in 0..n {
                let scaled = vectors[(i, k)].scale(inv);
                vectors[(i, k)] = scaled;
            }
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Complex Schur decomposition `F = Q T Q^H` with `Q` unitary and `T`
/// upper triangular; the eigenvalues of `F` are the diagonal of `T`.
///
/// No balancing similarity is applied: callers that transform equations
/// through `Q` rely on its unitarity for backward stability, which a
/// diagonal balancing would destroy.
pub fn schur_decomposition<T: Scalar>(
    f: &Mat<T>,
) -> Result<(Mat<Complex<T>>, Mat<Complex<T>>)> {
    if !f.is_square() {
        return Err(Error::DimensionMismatch {
            op: "schur_decomposition",
            detail: format!("matrix is {}x{}", f.rows(), f.cols()),
        });
    }
    let n = f.rows();
    let mut t = f.to_complex();
    let mut q = Mat::identity(n);
    hessenberg(&mut t, &mut q);
    schur(&mut t, &mut q)?;
    // The iteration drives the subdiagonal below deflation thresholds;
    // make the triangular form exact so substitution never sees noise.
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = Complex::new(T::zero(), T::zero());
        }
    }
    Ok((t, q))
}

/// Eigenvalues of the pencil `(A, E)`: the roots of `det(sE − A) = 0`,
/// computed by reducing to `E⁻¹A` and running the dense solver. Pass
/// `E = None` for an identity left-hand side.
///
/// Each eigenvalue carries the residual `‖A v − λ E v‖₂` of its unit
/// eigenvector; large residuals flag poorly determined eigenvalues.
pub fn eigenvalues_pencil<T: Scalar>(a: &Mat<T>, e: Option<&Mat<T>>) -> Result<Spectrum<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op: "eigenvalues_pencil",
            detail: format!("A is {}x{}", a.rows(), a.cols()),
        });
    }
    if let Some(em) = e {
        if em.rows() != a.rows() || em.cols() != a.cols() {
            return Err(Error::DimensionMismatch {
                op: "eigenvalues_pencil",
                detail: format!(
                    "A is {}x{} but E is {}x{}",
                    a.rows(),
                    a.cols(),
                    em.rows(),
                    em.cols()
                ),
            });
        }
    }
    let f = match e {
        Some(em) => solve_linear(em, a)?,
        None => a.clone(),
    };
    let decomp = eigen_dense(&f)?;
    let n = a.rows();
    let ac = a.to_complex();
    let av = ac.matmul(&decomp.vectors);
    let ev = match e {
        Some(em) => em.to_complex().matmul(&decomp.vectors),
        None => decomp.vectors.clone(),
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (decomp.values[i], decomp.values[j]);
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
    let mut eigenvalues = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for &k in &order {
        let lam = decomp.values[k];
        let mut res_sq = T::zero();
        for i in 0..n {
            let r = av[(i, k)] - lam * ev[(i, k)];
            let m = r.modulus();
            res_sq += m * m;
        }
        eigenvalues.push(lam);
        residuals.push(res_sq.sqrt());
    }
    Ok(Spectrum {
        eigenvalues,
        residuals,
    })
}

/// Estimate the smallest singular value of a square matrix by inverse power
/// iteration on `(AᵀA)⁻¹`; used by invariant checks that need to certify a
/// matrix is safely invertible.
pub fn smallest_singular_value_estimate<T: Scalar>(a: &Mat<T>) -> Result<T> {
    let n = a.rows();
    if n == 0 {
        return Err(Error::DimensionMismatch {
            op: "smallest_singular_value_estimate",
            detail: "empty matrix".into(),
        });
    }
    let lu_a = lu_factor(a, "smallest_singular_value_estimate")?;
    let at = a.transpose();
    let lu_at = lu_factor(&at, "smallest_singular_value_estimate")?;
    let mut v = Mat::from_fn(n, 1, |i, _| {
        T::one() + T::of_usize(i + 1) / T::of_usize(7 * n)
    });
    let norm0 = v.frobenius();
    v = v.scale_entries(T::one() / norm0);
    let mut rho = T::one();
    for _ in 0..40 {
        let y = lu_at.solve(&v)?;
        let w = lu_a.solve(&y)?;
        rho = w.frobenius();
        if rho == T::zero() {
            break;
        }
        v = w.scale_entries(T::one() / rho);
    }
    // rho converges to 1/sigma_min^2.
    Ok(T::one() / rho.sqrt())
}
