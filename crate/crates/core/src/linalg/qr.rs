use super::dense::{back_substitute_cols, householder_qr, invert_upper_cols};
use super::{axpy, dot, givens, norm, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Thin QR factorization `Φ_A = Q R` of a set of dictionary columns that
/// supports appending and deleting columns.
///
/// `Q` is `n x p` with orthonormal columns and `R` is `p x p` upper triangular
/// with a nonnegative diagonal. Column `j` of the factorization corresponds to
/// the dictionary column `col_ids()[j]`.
///
/// Optionally the factorization also carries `R⁻¹`, which is updated by the
/// same rotations as `Q` and makes [`UpdatableQR::gamma`] an `O(p²)` read.
#[derive(Clone, Debug)]
pub struct UpdatableQR<T> {
    n: usize,
    q: Vec<Vec<T>>,
    r: Vec<Vec<T>>,
    col_ids: Vec<usize>,
    rinv: Option<Vec<Vec<T>>>,
    updates: usize,
}

/// `diag((Φ_Aᵀ Φ_A)⁻¹)` in factorization order.
#[derive(Clone, Debug, PartialEq)]
pub struct Gamma<T>(pub Vec<T>);

impl<T> Gamma<T> {
    pub fn values(&self) -> &[T] {
        &self.0
    }
}

impl<T: Real> UpdatableQR<T> {
    /// Factorization of zero columns in `R^n`.
    pub fn empty(n: usize) -> Self {
        Self { n, q: Vec::new(), r: Vec::new(), col_ids: Vec::new(), rinv: None, updates: 0 }
    }

    /// Householder factorization of `matrix[:, columns]`.
    pub fn new(matrix: &Matrix<T>, columns: &[usize]) -> Result<Self> {
        let n = matrix.nrows();
        check_ids(columns, matrix.ncols())?;
        if columns.len() > n {
            return Err(Error::RankDeficient(format!(
                "{} columns cannot have full column rank in dimension {n}",
                columns.len()
            )));
        }
        let sub = matrix.select_columns(columns);
        let (q, r) = householder_qr(&sub);
        let tol = T::rank_tol();
        for (j, &id) in columns.iter().enumerate() {
            let cn = norm(sub.col(j));
            if cn == T::zero() || r[(j, j)] < tol * cn {
                return Err(Error::RankDeficient(format!(
                    "column {id} is numerically dependent on the preceding columns"
                )));
            }
        }
        let p = columns.len();
        Ok(Self {
            n,
            q: (0..p).map(|j| q.col(j).to_vec()).collect(),
            r: (0..p).map(|j| r.col(j).to_vec()).collect(),
            col_ids: columns.to_vec(),
            rinv: None,
            updates: 0,
        })
    }

    /// Keeps an explicit `R⁻¹` in sync with every subsequent update.
    pub fn enable_inverse_tracking(&mut self) -> Result<()> {
        if self.rinv.is_none() {
            self.rinv = Some(invert_upper_cols(&self.r)?);
        }
        Ok(())
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.n
    }

    /// Number of factored columns `p`.
    #[inline]
    pub fn len(&self) -> usize {
        self.col_ids.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.col_ids.is_empty()
    }

    pub fn col_ids(&self) -> &[usize] {
        &self.col_ids
    }

    pub fn position(&self, id: usize) -> Option<usize> {
        self.col_ids.iter().position(|&c| c == id)
    }

    /// Count of insert/remove operations performed since construction.
    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn q(&self) -> Matrix<T> {
        Matrix::from_columns(self.n, &self.q).expect("consistent column lengths")
    }

    pub fn r(&self) -> Matrix<T> {
        let p = self.len();
        Matrix::from_columns(p, &self.r).expect("consistent column lengths")
    }

    pub fn q_col(&self, j: usize) -> &[T] {
        &self.q[j]
    }

    /// `Qᵀ v`
    pub fn qt_mul(&self, v: &[T]) -> Vec<T> {
        self.q.iter().map(|c| dot(c, v)).collect()
    }

    /// `v - Q Qᵀ v` with one reorthogonalization pass, together with the
    /// accumulated projection coefficients `Qᵀ v`.
    pub fn project_out(&self, v: &[T]) -> (Vec<T>, Vec<T>) {
        let mut w = v.to_vec();
        let mut coeffs = vec![T::zero(); self.len()];
        for _pass in 0..2 {
            let s = self.qt_mul(&w);
            for (j, &sj) in s.iter().enumerate() {
                axpy(-sj, &self.q[j], &mut w);
                coeffs[j] += sj;
            }
        }
        (w, coeffs)
    }

    /// Appends dictionary column `id` with values `col`.
    pub fn insert_column(&mut self, col: &[T], id: usize) -> Result<()> {
        if col.len() != self.n {
            return Err(Error::DimensionMismatch(format!("column has length {}, expected {}", col.len(), self.n)));
        }
        if self.col_ids.contains(&id) {
            return Err(Error::RankDeficient(format!("column {id} is already factored")));
        }
        if self.len() >= self.n {
            return Err(Error::RankDeficient(format!(
                "cannot add column {id}: factorization already spans R^{}",
                self.n
            )));
        }
        let cn = norm(col);
        let (mut w, coeffs) = self.project_out(col);
        let rho = norm(&w);
        if cn == T::zero() || rho < T::rank_tol() * cn {
            return Err(Error::RankDeficient(format!("column {id} lies in the span of the active columns")));
        }
        for x in w.iter_mut() {
            *x /= rho;
        }

        if let Some(rinv) = self.rinv.as_mut() {
            // [R a; 0 ρ]⁻¹ = [W  -W a / ρ; 0  1/ρ]
            let p = rinv.len();
            let mut new_col = vec![T::zero(); p + 1];
            for (k, wk) in rinv.iter().enumerate() {
                axpy(-coeffs[k] / rho, wk, &mut new_col[..p]);
            }
            new_col[p] = T::one() / rho;
            for c in rinv.iter_mut() {
                c.push(T::zero());
            }
            rinv.push(new_col);
        }

        for c in self.r.iter_mut() {
            c.push(T::zero());
        }
        let mut rcol = coeffs;
        rcol.push(rho);
        self.r.push(rcol);
        self.q.push(w);
        self.col_ids.push(id);
        self.updates += 1;
        Ok(())
    }

    /// Deletes dictionary column `id`, restoring triangularity with Givens
    /// rotations applied to `R`, `Q` and (when tracked) `R⁻¹`.
    pub fn remove_column(&mut self, id: usize) -> Result<()> {
        let k = self.position(id).ok_or(Error::UnknownColumn(id))?;
        let p = self.len();
        self.r.remove(k);
        self.col_ids.remove(k);

        // R is now p x (p-1) upper Hessenberg from column k on
        for j in k..p - 1 {
            let (c, s, rr) = givens(self.r[j][j], self.r[j][j + 1]);
            self.r[j][j] = rr;
            self.r[j][j + 1] = T::zero();
            for col in self.r[j + 1..].iter_mut() {
                let (a, b) = (col[j], col[j + 1]);
                col[j] = c * a + s * b;
                col[j + 1] = -s * a + c * b;
            }
            rotate_pair(&mut self.q, j, c, s);
            if let Some(rinv) = self.rinv.as_mut() {
                rotate_pair(rinv, j, c, s);
            }
        }

        for col in self.r.iter_mut() {
            col.truncate(p - 1);
        }
        self.q.truncate(p - 1);
        if let Some(rinv) = self.rinv.as_mut() {
            // leading block of Pᵀ R⁻¹ G: drop row k and the trailing column
            rinv.truncate(p - 1);
            for (j, col) in rinv.iter_mut().enumerate() {
                col.remove(k);
                for x in col[j + 1..].iter_mut() {
                    *x = T::zero();
                }
            }
        }
        self.updates += 1;
        Ok(())
    }

    /// Least-squares coefficients `R⁻¹ Qᵀ y` (factorization order) and the
    /// residual norm `‖y − Q Qᵀ y‖`.
    pub fn solve_ls(&self, y: &[T]) -> Result<(Vec<T>, T)> {
        let z = self.qt_mul(y);
        let x = back_substitute_cols(&self.r, &z)?;
        let mut resid = y.to_vec();
        for (j, &zj) in z.iter().enumerate() {
            axpy(-zj, &self.q[j], &mut resid);
        }
        Ok((x, norm(&resid)))
    }

    /// Residual vector `y − Q Qᵀ y`.
    pub fn residual(&self, y: &[T]) -> Vec<T> {
        let z = self.qt_mul(y);
        let mut resid = y.to_vec();
        for (j, &zj) in z.iter().enumerate() {
            axpy(-zj, &self.q[j], &mut resid);
        }
        resid
    }

    /// `diag((RᵀR)⁻¹)`: squared row norms of `R⁻¹`.
    ///
    /// Uses the tracked inverse when [`enable_inverse_tracking`](Self::enable_inverse_tracking)
    /// is on, otherwise performs one triangular inversion.
    pub fn gamma(&self) -> Result<Gamma<T>> {
        let fresh;
        let inv = match &self.rinv {
            Some(w) => w,
            None => {
                fresh = invert_upper_cols(&self.r)?;
                &fresh
            }
        };
        let p = self.len();
        let mut g = vec![T::zero(); p];
        for (j, col) in inv.iter().enumerate() {
            for (i, &w) in col.iter().enumerate().take(j + 1) {
                g[i] += w * w;
            }
        }
        if let Some(i) = g.iter().position(|v| !(*v > T::zero()) || !v.is_finite()) {
            return Err(Error::RankDeficient(format!("gamma entry {i} is not positive; R is singular")));
        }
        Ok(Gamma(g))
    }
}

/// Replaces `(cols[j], cols[j+1])` with `(c·a + s·b, −s·a + c·b)`.
#[inline]
fn rotate_pair<T: Real>(cols: &mut [Vec<T>], j: usize, c: T, s: T) {
    let (left, right) = cols.split_at_mut(j + 1);
    let (a, b) = (&mut left[j], &mut right[0]);
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (u, v) = (*x, *y);
        *x = c * u + s * v;
        *y = -s * u + c * v;
    }
}

fn check_ids(ids: &[usize], m: usize) -> Result<()> {
    for (i, &id) in ids.iter().enumerate() {
        if id >= m {
            return Err(Error::DimensionMismatch(format!("column index {id} out of range (m = {m})")));
        }
        if ids[..i].contains(&id) {
            return Err(Error::InvalidConfig(format!("duplicate column index {id}")));
        }
    }
    Ok(())
}
