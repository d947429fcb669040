//! Computable recovery certificates and dictionary diagnostics.
//!
//! For a dictionary with full column rank, backward elimination (both the
//! residual-based rule and LACE) recovers the support of `x` from `Φx + ε`
//! whenever
//!
//! ```text
//! σ_min(Φ) / 2 · min_{i ∈ S} |x_i|  >  ‖ε‖₂ .
//! ```
//!
//! Applied after the fact to a returned `k`-sparse fit, with its residual in
//! place of `ε`, the same inequality certifies that the fit is the optimal
//! `k`-sparse least-squares solution.

use crate::error::{Error, Result};
use crate::greedy::{backward_path, DeletionRule};
use crate::linalg::dense::sigma_min as dense_sigma_min;
use crate::linalg::{dot, norm, UpdatableQR};
use crate::model::{ActiveSet, Certificate, Dictionary, RecoveryOutcome};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificateReport<T> {
    /// `σ_min(Φ) / 2 · min |x_i|`
    pub bound: T,
    pub residual_norm: T,
    /// `bound > residual_norm`
    pub holds: bool,
    pub sigma_min: T,
    pub min_abs_coeff: T,
}

/// Smallest singular value of the whole dictionary (zero when `m > n`).
pub fn sigma_min<T: Real>(dict: &Dictionary<T>) -> T {
    dense_sigma_min(dict.matrix())
}

/// Largest noise norm under which backward elimination is guaranteed to
/// recover a support whose smallest coefficient magnitude is `min_abs_coeff`.
pub fn recovery_bound<T: Real>(dict: &Dictionary<T>, min_abs_coeff: T) -> Result<T> {
    if !(min_abs_coeff > T::zero()) {
        return Err(Error::InvalidSpec("minimum coefficient magnitude must be positive".into()));
    }
    let smin = sigma_min(dict);
    let smax = crate::linalg::dense::singular_values(dict.matrix())[0];
    if dict.m() > dict.n() || smin <= T::rank_tol() * smax {
        return Err(Error::RankDeficient(format!("smallest singular value {smin} is numerically zero")));
    }
    Ok(smin / T::lit(2.0) * min_abs_coeff)
}

/// Certificate for a returned fit given a precomputed `σ_min(Φ)`.
pub fn check_with_sigma<T: Real>(
    dict: &Dictionary<T>,
    y: &[T],
    outcome: &RecoveryOutcome<T>,
    sigma_min: T,
) -> CertificateReport<T> {
    let fit = dict.combine(outcome.support(), &outcome.coefficients);
    let residual_norm = if y.len() == fit.len() { norm(&crate::linalg::sub(y, &fit)) } else { T::infinity() };
    let min_abs_coeff = if outcome.coefficients.is_empty() { T::zero() } else { outcome.min_abs_coefficient() };
    let sigma_min = if sigma_min.is_finite() { sigma_min.max(T::zero()) } else { T::zero() };
    let bound = sigma_min / T::lit(2.0) * min_abs_coeff;
    CertificateReport { bound, residual_norm, holds: bound > residual_norm, sigma_min, min_abs_coeff }
}

/// Post-hoc optimality check of a returned `k`-sparse fit.
pub fn posthoc_check<T: Real>(dict: &Dictionary<T>, y: &[T], outcome: &RecoveryOutcome<T>) -> CertificateReport<T> {
    check_with_sigma(dict, y, outcome, sigma_min(dict))
}

/// Fits `y` by least squares on `set` and checks the certificate for that fit.
pub fn check_support<T: Real>(dict: &Dictionary<T>, y: &[T], set: &ActiveSet) -> Result<CertificateReport<T>> {
    dict.check_target(y)?;
    if set.is_empty() {
        return Err(Error::InvalidConfig("support must be nonempty".into()));
    }
    let qr = UpdatableQR::new(dict.matrix(), set.ids())?;
    let (x, res) = qr.solve_ls(y)?;
    let outcome = RecoveryOutcome::from_unsorted(set.ids(), &x, res, 0, 0);
    Ok(posthoc_check(dict, y, &outcome))
}

/// Runs [`posthoc_check`] and records the verdict in the outcome.
pub fn certify<T: Real>(
    dict: &Dictionary<T>,
    y: &[T],
    mut outcome: RecoveryOutcome<T>,
) -> (RecoveryOutcome<T>, CertificateReport<T>) {
    let report = posthoc_check(dict, y, &outcome);
    outcome.certificate = if report.holds { Certificate::Proven } else { Certificate::Unproven };
    (outcome, report)
}

/// Smallest sparsity level `k < m` at which the backward-regression iterate
/// carries a valid certificate, or `m` when no iterate does.
pub fn adaptive_stop_sparsity<T: Real>(dict: &Dictionary<T>, y: &[T]) -> Result<usize> {
    let m = dict.m();
    if m < 2 {
        return Ok(m);
    }
    let smin = sigma_min(dict);
    let (steps, last) = backward_path(dict, y, 1, DeletionRule::Backward)?;
    let mut best = m;
    // steps[0] is the full set; iterates of size m-1 .. 2 follow, then `last`
    let iterates =
        steps.iter().skip(1).map(|s| RecoveryOutcome::from_unsorted(&s.active, &s.coefficients, s.residual_norm, 0, 0));
    for it in iterates.chain(std::iter::once(last)) {
        if check_with_sigma(dict, y, &it, smin).holds {
            best = best.min(it.support().len());
        }
    }
    Ok(best)
}

/// Babel function `μ₁(k)` of the column-normalized dictionary: the largest
/// total absolute correlation between one atom and `k` others.
pub fn babel<T: Real>(dict: &Dictionary<T>, k: usize) -> Result<T> {
    let m = dict.m();
    if k == 0 || k + 1 > m {
        return Err(Error::InvalidOrder { k, max: m.saturating_sub(1) });
    }
    let d = dict.normalized();
    let mut worst = T::zero();
    let mut row = Vec::with_capacity(m - 1);
    for i in 0..m {
        row.clear();
        row.extend((0..m).filter(|&j| j != i).map(|j| dot(d.atom(i), d.atom(j)).abs()));
        // k largest entries land in row[..k]
        row.select_nth_unstable_by(k - 1, |a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let s: T = row[..k].iter().copied().sum();
        worst = worst.max(s);
    }
    Ok(worst)
}

/// Smallest singular value of `Φ_A`.
pub fn sigma_min_active<T: Real>(dict: &Dictionary<T>, set: &ActiveSet) -> T {
    dense_sigma_min(&dict.matrix().select_columns(set.ids()))
}
