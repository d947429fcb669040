//! Comparison implementations of backward regression. Both select with the
//! same rule and tie-breaking as [`backward_regression`](crate::greedy::backward_regression)
//! but compute the criterion differently.

use crate::error::{Error, Result};
use crate::greedy::argmin_by_id;
use crate::linalg::{dot, givens, norm, sub, UpdatableQR};
use crate::model::{Dictionary, RecoveryOutcome};
use crate::scalar::Real;

fn check<T: Real>(dict: &Dictionary<T>, y: &[T], k: usize) -> Result<()> {
    if y.len() != dict.n() {
        return Err(Error::DimensionMismatch(format!("target has length {}, expected {}", y.len(), dict.n())));
    }
    if k >= dict.m() {
        return Err(Error::InvalidSparsity { k, m: dict.m() });
    }
    if dict.m() > dict.n() {
        return Err(Error::RankDeficient(format!("m = {} > n = {}", dict.m(), dict.n())));
    }
    Ok(())
}

/// Backward regression on the normal equations: keeps `(ΦᵀΦ)⁻¹` and the
/// coefficients up to date with rank-one downdates after every deletion.
/// Squaring the condition number makes it unreliable on ill-conditioned
/// dictionaries.
pub fn normal_br<T: Real>(dict: &Dictionary<T>, y: &[T], k: usize) -> Result<RecoveryOutcome<T>> {
    check(dict, y, k)?;
    let m = dict.m();
    // Cholesky factor L of the Gram matrix, stored row-wise
    let mut l = vec![vec![T::zero(); m]; m];
    for i in 0..m {
        for j in 0..=i {
            let s = dot(dict.atom(i), dict.atom(j)) - dot(&l[i][..j], &l[j][..j]);
            if i == j {
                if !(s > T::zero()) {
                    return Err(Error::NumericalBreakdown(format!("Gram matrix not positive definite at pivot {i}")));
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // L⁻¹ by forward substitution, then G⁻¹ = L⁻ᵀ L⁻¹
    let mut linv = vec![vec![T::zero(); m]; m];
    for c in 0..m {
        linv[c][c] = T::one() / l[c][c];
        for i in c + 1..m {
            let s = l[i][c..i].iter().zip(&linv[c..i]).fold(T::zero(), |acc, (&a, row)| acc + a * row[c]);
            linv[i][c] = -s / l[i][i];
        }
    }
    let mut ginv = vec![vec![T::zero(); m]; m];
    for i in 0..m {
        for j in 0..=i {
            let s = linv[i..].iter().fold(T::zero(), |acc, row| acc + row[i] * row[j]);
            ginv[i][j] = s;
            ginv[j][i] = s;
        }
    }
    let b = dict.matrix().tr_mul_vec(y);
    let mut x: Vec<T> = (0..m).map(|i| dot(&ginv[i], &b)).collect();

    let mut active: Vec<usize> = (0..m).collect();
    let mut iterations = 0;
    while active.len() > k {
        let mut scores = Vec::with_capacity(active.len());
        for &i in &active {
            let g = ginv[i][i];
            if !(g > T::zero()) || !g.is_finite() {
                return Err(Error::NumericalBreakdown(format!("inverse Gram diagonal {g} at atom {i}")));
            }
            scores.push(x[i] * x[i] / g);
        }
        let pos = argmin_by_id(&scores, &active).expect("nonempty active set");
        let d = active.remove(pos);
        let gdd = ginv[d][d];
        let xd = x[d];
        let col: Vec<T> = active.iter().map(|&i| ginv[i][d]).collect();
        for (a, &i) in active.iter().enumerate() {
            x[i] -= col[a] * xd / gdd;
            for (bb, &j) in active.iter().enumerate() {
                ginv[i][j] -= col[a] * col[bb] / gdd;
            }
        }
        iterations += 1;
    }
    let coeffs: Vec<T> = active.iter().map(|&i| x[i]).collect();
    let fit = dict.combine(&active, &coeffs);
    let res = norm(&sub(y, &fit));
    Ok(RecoveryOutcome::from_unsorted(&active, &coeffs, res, iterations, 0))
}

/// Backward regression that scores every candidate by deleting its column
/// from a copy of the triangular factor, re-triangularizing, and reading off
/// the residual of the reduced system.
pub fn naive_br<T: Real>(dict: &Dictionary<T>, y: &[T], k: usize) -> Result<RecoveryOutcome<T>> {
    check(dict, y, k)?;
    let all: Vec<usize> = (0..dict.m()).collect();
    let mut qr = UpdatableQR::new(dict.matrix(), &all)?;
    let mut iterations = 0;
    while qr.len() > k {
        let scores = naive_deletion_costs(&qr, y);
        let pos = argmin_by_id(&scores, qr.col_ids()).expect("nonempty active set");
        let removed = qr.col_ids()[pos];
        qr.remove_column(removed)?;
        iterations += 1;
    }
    let (x, res) = qr.solve_ls(y)?;
    Ok(RecoveryOutcome::from_unsorted(qr.col_ids(), &x, res, iterations, qr.updates()))
}

/// `‖r_{A∖i}‖² − ‖r_A‖²` for every factored column, each by an explicit
/// column removal on a scratch copy of `R` and `Qᵀy`.
pub fn naive_deletion_costs<T: Real>(qr: &UpdatableQR<T>, y: &[T]) -> Vec<T> {
    let r = qr.r();
    let z = qr.qt_mul(y);
    let p = qr.len();
    let mut work: Vec<Vec<T>> = Vec::with_capacity(p);
    (0..p)
        .map(|j| {
            // rows j.. of the columns right of j; column c of `work` moves to
            // position j + c and carries one subdiagonal entry in local row c + 1
            work.clear();
            work.extend((j + 1..p).map(|col| (j..p).map(|i| r[(i, col)]).collect::<Vec<T>>()));
            let mut zz = z[j..].to_vec();
            for c in 0..work.len() {
                let (cs, sn, rr) = givens(work[c][c], work[c][c + 1]);
                work[c][c] = rr;
                work[c][c + 1] = T::zero();
                for w in work.iter_mut().skip(c + 1) {
                    let (a, b) = (w[c], w[c + 1]);
                    w[c] = cs * a + sn * b;
                    w[c + 1] = cs * b - sn * a;
                }
                let (a, b) = (zz[c], zz[c + 1]);
                zz[c] = cs * a + sn * b;
                zz[c + 1] = cs * b - sn * a;
            }
            // the last rotated component of Qᵀy leaves the reduced column space
            let lost = zz[p - 1 - j];
            lost * lost
        })
        .collect()
}
