//! One-shot dense kernels: Householder QR, one-sided Jacobi singular values,
//! and triangular solves.

use super::{dot, norm, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Thin Householder QR of an `n x p` matrix with `p <= n`.
///
/// Returns `(Q, R)` with `Q` of size `n x p` and `R` of size `p x p`, upper
/// triangular with a nonnegative diagonal.
pub fn householder_qr<T: Real>(a: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let (n, p) = (a.nrows(), a.ncols());
    assert!(p <= n, "householder_qr needs at least as many rows as columns");
    let mut work = a.clone();
    let mut reflectors: Vec<Vec<T>> = Vec::with_capacity(p);

    for j in 0..p {
        let x = &work.col(j)[j..];
        let alpha = norm(x);
        let mut v = x.to_vec();
        if alpha == T::zero() {
            reflectors.push(v);
            continue;
        }
        // reflect onto -sign(x0) * alpha * e1 to avoid cancellation
        let sign = if v[0] >= T::zero() { T::one() } else { -T::one() };
        v[0] += sign * alpha;
        let vnorm = norm(&v);
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }
        for k in j..p {
            let col = &mut work.col_mut(k)[j..];
            let t = dot(&v, col) * T::lit(2.0);
            for (ci, &vi) in col.iter_mut().zip(&v) {
                *ci -= t * vi;
            }
        }
        reflectors.push(v);
    }

    let mut r = Matrix::zeros(p, p);
    for j in 0..p {
        for i in 0..=j {
            r[(i, j)] = work[(i, j)];
        }
    }

    // Q = H_0 H_1 ... H_{p-1} applied to the first p columns of the identity
    let mut q = Matrix::zeros(n, p);
    for j in 0..p {
        q[(j, j)] = T::one();
    }
    for (j, v) in reflectors.iter().enumerate().rev() {
        if v.iter().all(|&x| x == T::zero()) {
            continue;
        }
        for k in 0..p {
            let col = &mut q.col_mut(k)[j..];
            let t = dot(v, col) * T::lit(2.0);
            for (ci, &vi) in col.iter_mut().zip(v) {
                *ci -= t * vi;
            }
        }
    }

    for i in 0..p {
        if r[(i, i)] < T::zero() {
            for k in i..p {
                r[(i, k)] = -r[(i, k)];
            }
            for x in q.col_mut(i) {
                *x = -*x;
            }
        }
    }
    (q, r)
}

/// Singular values of `a` in descending order (`min(n, m)` of them), by
/// one-sided Jacobi rotations.
pub fn singular_values<T: Real>(a: &Matrix<T>) -> Vec<T> {
    let mut work = if a.ncols() > a.nrows() { a.transpose() } else { a.clone() };
    let p = work.ncols();
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..p {
            for j in (i + 1)..p {
                let (ci, cj) = (work.col(i), work.col(j));
                let alpha = dot(ci, ci);
                let beta = dot(cj, cj);
                let gamma = dot(ci, cj);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let n = work.nrows();
                for row in 0..n {
                    let x = work[(row, i)];
                    let y = work[(row, j)];
                    work[(row, i)] = c * x - s * y;
                    work[(row, j)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv = work.column_norms();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Smallest singular value; zero when the matrix has more columns than rows.
pub fn sigma_min<T: Real>(a: &Matrix<T>) -> T {
    if a.ncols() == 0 || a.nrows() == 0 {
        return T::zero();
    }
    if a.ncols() > a.nrows() {
        return T::zero();
    }
    singular_values(a).last().copied().unwrap_or(T::zero())
}

/// Solves `R x = b` for upper-triangular `R` given as a list of columns.
pub(crate) fn back_substitute_cols<T: Real>(r: &[Vec<T>], b: &[T]) -> Result<Vec<T>> {
    let p = r.len();
    let mut x = b[..p].to_vec();
    for i in (0..p).rev() {
        let d = r[i][i];
        if d == T::zero() || !d.is_finite() {
            return Err(Error::RankDeficient(format!("zero pivot at position {i} in back-substitution")));
        }
        x[i] /= d;
        let xi = x[i];
        for (k, xk) in x.iter_mut().enumerate().take(i) {
            *xk -= r[i][k] * xi;
        }
    }
    Ok(x)
}

/// Inverse of an upper-triangular `R` (list of columns), returned as columns.
pub(crate) fn invert_upper_cols<T: Real>(r: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let p = r.len();
    let mut inv = Vec::with_capacity(p);
    for j in 0..p {
        let mut e = vec![T::zero(); p];
        e[j] = T::one();
        // only the leading j+1 block matters for column j
        let sub: Vec<Vec<T>> = r[..=j].iter().map(|c| c[..=j].to_vec()).collect();
        let mut col = back_substitute_cols(&sub, &e[..=j])?;
        col.resize(p, T::zero());
        inv.push(col);
    }
    Ok(inv)
}
