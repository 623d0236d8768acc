//! Dense row-major matrices over real or complex floating-point entries.

use crate::error::{Error, Result};
use crate::scalar::{Entry, Scalar};
use num_complex::Complex;
use num_traits::Float;
use std::ops::{Index, IndexMut};

/// Dense matrix with row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Entry> Mat<S> {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Build from a closure over (row, column).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Build from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    op: "Mat::from_rows",
                    detail: format!("row {i} has length {} but row 0 has {c}", row.len()),
                });
            }
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Build from a flat row-major buffer.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "Mat::from_flat",
                detail: format!("{rows}x{cols} needs {} entries, got {}", rows * cols, data.len()),
            });
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Flat row-major view of the entries.
    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    /// Row `i` as a contiguous slice.
    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Transpose (not conjugated).
    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise map into a possibly different entry type.
    pub fn map<U: Entry>(&self, mut f: impl FnMut(S) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == S::zero() {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = out.row_mut(i);
                for (o, &r) in out_row.iter_mut().zip(rhs_row) {
                    *o += aik * r;
                }
            }
        }
        out
    }

    /// Entrywise sum.
    pub fn add(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    /// Entrywise difference.
    pub fn sub(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    /// Multiply every entry by `factor`.
    pub fn scale_entries(&self, factor: S) -> Mat<S> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * factor).collect(),
        }
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> S::Real {
        let mut acc = <S::Real as num_traits::Zero>::zero();
        for &x in &self.data {
            let m = x.modulus();
            acc = acc + m * m;
        }
        acc.sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> S::Real {
        let mut best = <S::Real as num_traits::Zero>::zero();
        for &x in &self.data {
            let m = x.modulus();
            if m > best {
                best = m;
            }
        }
        best
    }

    /// Sum of the diagonal entries.
    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self[(i, i)];
        }
        t
    }

    /// Kronecker product `self (x) rhs`: block (i, j) equals
    /// `self[(i, j)] * rhs`.
    pub fn kron(&self, rhs: &Mat<S>) -> Mat<S> {
        let (p, q) = (rhs.rows, rhs.cols);
        let mut out = Mat::zeros(self.rows * p, self.cols * q);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let aij = self[(i, j)];
                if aij == S::zero() {
                    continue;
                }
                for r in 0..p {
                    for c in 0..q {
                        out[(i * p + r, j * q + c)] = aij * rhs[(r, c)];
                    }
                }
            }
        }
        out
    }

    /// Paste `block` with its (0,0) entry at (`row`, `col`).
    pub fn set_block(&mut self, row: usize, col: usize, block: &Mat<S>) {
        assert!(row + block.rows <= self.rows && col + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)];
            }
        }
    }

    /// Copy of the `rows x cols` block whose (0,0) entry sits at (`row`, `col`).
    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Mat<S> {
        assert!(row + rows <= self.rows && col + cols <= self.cols);
        Mat::from_fn(rows, cols, |i, j| self[(row + i, col + j)])
    }
}

impl<T: Scalar> Mat<T> {
    /// Promote a real matrix to complex entries.
    pub fn to_complex(&self) -> Mat<Complex<T>> {
        self.map(|x| Complex::new(x, T::zero()))
    }
}

impl<T: Scalar> Mat<Complex<T>> {
    /// Real part of a complex matrix.
    pub fn real_part(&self) -> Mat<T> {
        self.map(|z| z.re)
    }

    /// Largest imaginary-part magnitude; diagnostic for results expected to
    /// be real up to rounding.
    pub fn max_imag_abs(&self) -> T {
        let mut best = T::zero();
        for &z in &self.data {
            if z.im.abs() > best {
                best = z.im.abs();
            }
        }
        best
    }
}

impl<S: Entry> Index<(usize, usize)> for Mat<S> {
    type Output = S;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S: Entry> IndexMut<(usize, usize)> for Mat<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product as a free function, mirroring the method.
pub fn kron<S: Entry>(a: &Mat<S>, b: &Mat<S>) -> Mat<S> {
    a.kron(b)
}
