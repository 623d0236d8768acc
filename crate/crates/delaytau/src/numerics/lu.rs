//! LU factorization with partial pivoting, over real or complex entries.

use super::mat::Mat;
use crate::error::{Error, Result};
use crate::scalar::{Entry, Scalar};

/// LU factorization `P A = L U` with row partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<S> {
    lu: Mat<S>,
    piv: Vec<usize>,
    swaps: usize,
}

/// Factor a square matrix; fails with a [`Error::Singular`] carrying the
/// offending pivot magnitude when the matrix is singular to tolerance.
pub fn lu_factor<S: Entry>(a: &Mat<S>, op: &'static str) -> Result<Lu<S>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op,
            detail: format!("LU needs a square matrix, got {}x{}", a.rows(), a.cols()),
        });
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    let mut swaps = 0usize;

    // Singularity threshold relative to the matrix scale.
    let scale = a.max_abs();
    let tol = <S::Real as Scalar>::eps() * scale * <S::Real as Scalar>::of_usize(n.max(1));

    for k in 0..n {
        // Pivot search in column k.
        let mut p = k;
        let mut best = lu[(k, k)].modulus();
        for i in (k + 1)..n {
            let m = lu[(i, k)].modulus();
            if m > best {
                best = m;
                p = i;
            }
        }
        if best <= tol {
            return Err(Error::Singular {
                op,
                pivot: best.as_f64(),
            });
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            piv.swap(k, p);
            swaps += 1;
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let m = lu[(i, k)] / pivot;
            lu[(i, k)] = m;
            if m == S::zero() {
                continue;
            }
            for j in (k + 1)..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= m * u;
            }
        }
    }
    Ok(Lu { lu, piv, swaps })
}

impl<S: Entry> Lu<S> {
    /// Solve `A X = B` for every column of `B`.
    pub fn solve(&self, b: &Mat<S>) -> Result<Mat<S>> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch {
                op: "Lu::solve",
                detail: format!("A is {n}x{n} but rhs has {} rows", b.rows()),
            });
        }
        let k = b.cols();
        // Apply the row permutation.
        let mut x = Mat::zeros(n, k);
        for i in 0..n {
            for j in 0..k {
                x[(i, j)] = b[(self.piv[i], j)];
            }
        }
        // Forward substitution with unit lower triangle.
        for i in 1..n {
            for r in 0..i {
                let l = self.lu[(i, r)];
                if l == S::zero() {
                    continue;
                }
                for j in 0..k {
                    let xr = x[(r, j)];
                    x[(i, j)] -= l * xr;
                }
            }
        }
        // Back substitution.
        for i in (0..n).rev() {
            for r in (i + 1)..n {
                let u = self.lu[(i, r)];
                if u == S::zero() {
                    continue;
                }
                for j in 0..k {
                    let xr = x[(r, j)];
                    x[(i, j)] -= u * xr;
                }
            }
            let d = self.lu[(i, i)];
            for j in 0..k {
                x[(i, j)] = x[(i, j)] / d;
            }
        }
        Ok(x)
    }

    /// Determinant from the factorization.
    pub fn det(&self) -> S {
        let n = self.lu.rows();
        let mut d = S::one();
        for i in 0..n {
            d = d * self.lu[(i, i)];
        }
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }
}

/// Solve `A X = B` by LU with partial pivoting.
pub fn solve_linear<S: Entry>(a: &Mat<S>, rhs: &Mat<S>) -> Result<Mat<S>> {
    lu_factor(a, "solve_linear")?.solve(rhs)
}
