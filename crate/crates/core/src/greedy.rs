//! Single-stage greedy selection: Backward Regression, LACE, Forward
//! Regression and OMP, plus the insertion/deletion criteria they share with
//! the two-stage algorithms.
//!
//! Deleting atom `i` from a least-squares fit on `A` raises the residual energy
//! by exactly `|x_i|² / γ_i` with `γ = diag((Φ_Aᵀ Φ_A)⁻¹)`. Backward
//! Regression deletes the atom with the smallest increase; LACE deletes the
//! atom with the smallest `|x_i|`. Both keep a QR factorization of the active
//! columns and downdate it after every deletion.
//!
//! All arg-min / arg-max selections break ties towards the lowest column index.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, UpdatableQR};
use crate::model::{Dictionary, RecoveryOutcome};
use crate::scalar::Real;

/// Criterion used to pick the atom to delete.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeletionRule {
    /// Smallest residual increase, `|x_i|² / γ_i`.
    Backward,
    /// Smallest coefficient magnitude (LACE).
    Magnitude,
}

/// Criterion used to pick the atom to add.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertionRule {
    /// Smallest next residual, `⟨φ_i, r⟩² / ‖(I − QQᵀ) φ_i‖²` maximized.
    Stepwise,
    /// Largest `|⟨φ_i, r⟩|` (OMP).
    Correlation,
}

/// Per-atom deletion scores in factorization order.
#[derive(Clone, Debug, PartialEq)]
pub struct DeletionScores<T>(pub Vec<T>);

impl<T: Real> DeletionScores<T> {
    pub fn values(&self) -> &[T] {
        &self.0
    }
}

/// `|x_i|² / γ_i` for every factored atom: the residual-energy increase caused
/// by deleting it.
pub fn deletion_scores<T: Real>(qr: &UpdatableQR<T>, x: &[T]) -> Result<DeletionScores<T>> {
    if x.len() != qr.len() {
        return Err(Error::DimensionMismatch(format!("{} coefficients for {} factored columns", x.len(), qr.len())));
    }
    let gamma = qr.gamma()?;
    Ok(DeletionScores(x.iter().zip(gamma.values()).map(|(&xi, &g)| xi * xi / g).collect()))
}

/// `|x_i|` for every factored atom.
pub fn magnitude_scores<T: Real>(x: &[T]) -> DeletionScores<T> {
    DeletionScores(x.iter().map(|v| v.abs()).collect())
}

fn scores_for<T: Real>(qr: &UpdatableQR<T>, x: &[T], rule: DeletionRule) -> Result<DeletionScores<T>> {
    match rule {
        DeletionRule::Backward => deletion_scores(qr, x),
        DeletionRule::Magnitude => Ok(magnitude_scores(x)),
    }
}

/// Position (in `ids`) of the smallest score; ties go to the lowest id.
pub(crate) fn argmin_by_id<T: Real>(scores: &[T], ids: &[usize]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (pos, (&s, &id)) in scores.iter().zip(ids).enumerate() {
        best = match best {
            None => Some(pos),
            Some(b) if s < scores[b] || (s == scores[b] && id < ids[b]) => Some(pos),
            keep => keep,
        };
    }
    best
}

/// The atom outside the factorization maximizing `rule` against residual `r`.
/// Atoms numerically inside the span of the factored columns are skipped.
pub(crate) fn best_insertion<T: Real>(
    dict: &Dictionary<T>,
    qr: &UpdatableQR<T>,
    r: &[T],
    rule: InsertionRule,
) -> Option<usize> {
    let tol = T::rank_tol();
    let mut best: Option<(usize, T)> = None;
    for i in 0..dict.m() {
        if qr.position(i).is_some() {
            continue;
        }
        let atom = dict.atom(i);
        let (proj, _) = qr.project_out(atom);
        let pn = norm(&proj);
        if !(pn >= tol * norm(atom)) || pn == T::zero() {
            continue;
        }
        let score = match rule {
            InsertionRule::Stepwise => {
                let c = dot(&proj, r) / pn;
                c * c
            }
            InsertionRule::Correlation => dot(atom, r).abs(),
        };
        // strict comparison in ascending index order keeps the lowest index on ties
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((i, score));
        }
    }
    best.map(|b| b.0)
}

/// One iterate of a backward elimination, recorded before the deletion.
#[derive(Clone, Debug, PartialEq)]
pub struct PathStep<T> {
    /// Active atoms in factorization order.
    pub active: Vec<usize>,
    pub coefficients: Vec<T>,
    pub residual_norm: T,
    pub scores: Vec<T>,
    /// Atom deleted at this step.
    pub removed: usize,
}

fn check_backward<T: Real>(dict: &Dictionary<T>, y: &[T], k: usize) -> Result<()> {
    dict.check_target(y)?;
    if k >= dict.m() {
        return Err(Error::InvalidSparsity { k, m: dict.m() });
    }
    if dict.m() > dict.n() {
        return Err(Error::RankDeficient(format!(
            "backward elimination needs full column rank, but m = {} > n = {}",
            dict.m(),
            dict.n()
        )));
    }
    Ok(())
}

fn eliminate<T: Real>(
    dict: &Dictionary<T>,
    y: &[T],
    k: usize,
    rule: DeletionRule,
    mut observe: impl FnMut(PathStep<T>),
    record: bool,
) -> Result<RecoveryOutcome<T>> {
    check_backward(dict, y, k)?;
    let all: Vec<usize> = (0..dict.m()).collect();
    let mut qr = UpdatableQR::new(dict.matrix(), &all)?;
    if rule == DeletionRule::Backward {
        qr.enable_inverse_tracking()?;
    }
    let mut iterations = 0;
    while qr.len() > k {
        let (x, res) = qr.solve_ls(y)?;
        let scores = scores_for(&qr, &x, rule)?;
        let pos = argmin_by_id(scores.values(), qr.col_ids()).expect("nonempty active set");
        let removed = qr.col_ids()[pos];
        if record {
            observe(PathStep {
                active: qr.col_ids().to_vec(),
                coefficients: x,
                residual_norm: res,
                scores: scores.0,
                removed,
            });
        }
        qr.remove_column(removed)?;
        iterations += 1;
    }
    let (x, res) = qr.solve_ls(y)?;
    Ok(RecoveryOutcome::from_unsorted(qr.col_ids(), &x, res, iterations, qr.updates()))
}

/// Backward Regression: start from every atom and delete, `m − k` times, the
/// atom whose removal increases the residual the least.
pub fn backward_regression<T: Real>(dict: &Dictionary<T>, y: &[T], k: usize) -> Result<RecoveryOutcome<T>> {
    eliminate(dict, y, k, DeletionRule::Backward, |_| {}, false)
}

/// Least-Absolute Coefficient Elimination: backward elimination by smallest
/// least-squares coefficient magnitude.
pub fn lace<T: Real>(dict: &Dictionary<T>, y: &[T], k: usize) -> Result<RecoveryOutcome<T>> {
    eliminate(dict, y, k, DeletionRule::Magnitude, |_| {}, false)
}

/// Runs a backward elimination down to `k` atoms and returns every
/// intermediate iterate along with the final outcome.
pub fn backward_path<T: Real>(
    dict: &Dictionary<T>,
    y: &[T],
    k: usize,
    rule: DeletionRule,
) -> Result<(Vec<PathStep<T>>, RecoveryOutcome<T>)> {
    let mut steps = Vec::new();
    let out = eliminate(dict, y, k, rule, |s| steps.push(s), true)?;
    Ok((steps, out))
}

fn insert_greedily<T: Real>(
    dict: &Dictionary<T>,
    y: &[T],
    k: usize,
    rule: InsertionRule,
) -> Result<RecoveryOutcome<T>> {
    dict.check_target(y)?;
    if k > dict.n().min(dict.m()) {
        return Err(Error::InvalidSparsity { k, m: dict.m() });
    }
    let mut qr = UpdatableQR::empty(dict.n());
    for step in 0..k {
        let r = qr.residual(y);
        let i = best_insertion(dict, &qr, &r, rule).ok_or_else(|| {
            Error::RankDeficient(format!("step {step}: every remaining atom lies in the active span"))
        })?;
        qr.insert_column(dict.atom(i), i)?;
    }
    let (x, res) = qr.solve_ls(y)?;
    Ok(RecoveryOutcome::from_unsorted(qr.col_ids(), &x, res, k, qr.updates()))
}

/// Forward Regression (OLS / OOMP): add, `k` times, the atom that minimizes the
/// next least-squares residual.
pub fn forward_regression<T: Real>(dict: &Dictionary<T>, y: &[T], k: usize) -> Result<RecoveryOutcome<T>> {
    insert_greedily(dict, y, k, InsertionRule::Stepwise)
}

/// Orthogonal Matching Pursuit: add the atom most correlated with the current
/// residual, then refit by least squares.
pub fn omp<T: Real>(dict: &Dictionary<T>, y: &[T], k: usize) -> Result<RecoveryOutcome<T>> {
    insert_greedily(dict, y, k, InsertionRule::Correlation)
}
