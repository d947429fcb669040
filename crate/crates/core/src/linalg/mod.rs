//! Dense column-major matrices, small vector kernels, and the updatable QR
//! factorization that every selection algorithm is built on.

pub mod dense;
mod qr;

pub use qr::{Gamma, UpdatableQR};

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense matrix stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![T::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(nrows: usize, ncols: usize, values: &[T]) -> Result<Self> {
        if values.len() != nrows * ncols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values for a {nrows}x{ncols} matrix, got {}",
                nrows * ncols,
                values.len()
            )));
        }
        let mut m = Self::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                m[(i, j)] = values[i * ncols + j];
            }
        }
        Ok(m)
    }

    /// Builds a matrix from a list of equally long columns.
    pub fn from_columns(nrows: usize, columns: &[Vec<T>]) -> Result<Self> {
        let mut data = Vec::with_capacity(nrows * columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != nrows {
                return Err(Error::DimensionMismatch(format!("column {j} has length {}, expected {nrows}", c.len())));
            }
            data.extend_from_slice(c);
        }
        Ok(Self { nrows, ncols: columns.len(), data })
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        let n = self.nrows;
        &mut self.data[j * n..(j + 1) * n]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[T]> {
        // chunks_exact panics on a zero chunk size
        let n = self.nrows.max(1);
        self.data.chunks_exact(n).take(if self.nrows == 0 { 0 } else { self.ncols })
    }

    /// Submatrix made of the listed columns, in the listed order.
    pub fn select_columns(&self, ids: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.nrows * ids.len());
        for &j in ids {
            data.extend_from_slice(self.col(j));
        }
        Self { nrows: self.nrows, ncols: ids.len(), data }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    /// `self * v`
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.ncols);
        let mut out = vec![T::zero(); self.nrows];
        for (c, &vj) in self.columns().zip(v) {
            axpy(vj, c, &mut out);
        }
        out
    }

    /// `selfᵀ * v`
    pub fn tr_mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.nrows);
        self.columns().map(|c| dot(c, v)).collect()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows);
        let mut out = Self::zeros(self.nrows, rhs.ncols);
        for j in 0..rhs.ncols {
            let dst = &mut out.data[j * self.nrows..(j + 1) * self.nrows];
            for (k, &b) in rhs.col(j).iter().enumerate() {
                if b != T::zero() {
                    axpy(b, self.col(k), dst);
                }
            }
        }
        out
    }

    pub fn column_norms(&self) -> Vec<T> {
        self.columns().map(norm).collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |a, &b| a.max(b.abs()))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix { nrows: self.nrows, ncols: self.ncols, data: self.data.iter().map(|&x| f(x)).collect() }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.nrows && j < self.ncols);
        &self.data[j * self.nrows + i]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.nrows && j < self.ncols);
        &mut self.data[j * self.nrows + i]
    }
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Euclidean norm, scaled to avoid overflow and underflow.
pub fn norm<T: Real>(v: &[T]) -> T {
    let scale = v.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let ss = v.iter().fold(T::zero(), |acc, &x| {
        let t = x / scale;
        acc + t * t
    });
    scale * ss.sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// Givens rotation `(c, s, r)` with `[c s; -s c] [a; b] = [r; 0]` and `r >= 0`.
#[inline]
pub fn givens<T: Real>(a: T, b: T) -> (T, T, T) {
    if b == T::zero() {
        if a < T::zero() {
            (-T::one(), T::zero(), -a)
        } else {
            (T::one(), T::zero(), a)
        }
    } else {
        let r = a.hypot(b);
        (a / r, b / r, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_round_trip() {
        let m = Matrix::from_row_major(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m[(0, 2)], 3.0);
        assert_eq!(m[(1, 0)], 4.0);
        assert_eq!(m.col(1), &[2.0, 5.0]);
        assert_eq!(m.transpose()[(2, 1)], 6.0);
        assert!(Matrix::<f64>::from_row_major(2, 2, &[1.0]).is_err());
    }

    #[test]
    fn products() {
        let a = Matrix::from_row_major(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(a.mul_vec(&[1.0, 1.0]), vec![3.0, 7.0]);
        assert_eq!(a.tr_mul_vec(&[1.0, 1.0]), vec![4.0, 6.0]);
        let b = a.matmul(&Matrix::identity(2));
        assert_eq!(a, b);
    }

    #[test]
    fn givens_zeroes_second_entry() {
        let (c, s, r) = givens(3.0_f64, 4.0);
        assert!((r - 5.0).abs() < 1e-15);
        assert!((-s * 3.0 + c * 4.0).abs() < 1e-15);
        let (_, _, r) = givens(-2.0_f64, 0.0);
        assert_eq!(r, 2.0);
    }

    #[test]
    fn norm_is_scaled() {
        assert!((norm(&[3.0e200_f64, 4.0e200]) / 5.0e200 - 1.0).abs() < 1e-15);
        assert_eq!(norm::<f64>(&[]), 0.0);
    }
}
