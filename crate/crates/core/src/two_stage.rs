//! Two-stage replacement algorithms on a fixed-size active set: Stepwise
//! Regression with Replacement (SRR), Subspace Pursuit and OMPR.
//!
//! All three start from the `k` atoms best correlated with the target, then
//! repeatedly grow and shrink the active set. They stop when the active set
//! revisits an earlier state, when a cycle fails to lower the residual, or
//! after `max_cycles`, and return the best iterate seen.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::greedy::{argmin_by_id, best_insertion, deletion_scores, InsertionRule};
use crate::linalg::{dot, UpdatableQR};
use crate::model::{Dictionary, RecoveryOutcome};
use crate::scalar::Real;

pub const DEFAULT_MAX_CYCLES: usize = 100;

/// Relative residual decrease below which a cycle counts as stalled.
pub const STALL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SrrConfig {
    /// Target sparsity.
    pub k: usize,
    /// Atoms added and removed per cycle.
    pub s: usize,
    pub max_cycles: usize,
}

impl SrrConfig {
    pub fn new(k: usize, s: usize) -> Self {
        Self { k, s, max_cycles: DEFAULT_MAX_CYCLES }
    }

    /// Single-step variant, `s = 1`.
    pub fn single_step(k: usize) -> Self {
        Self::new(k, 1)
    }

    /// Full-replacement variant, `s = k`.
    pub fn full_step(k: usize) -> Self {
        Self::new(k, k)
    }

    fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.k == 0 || self.s == 0 || self.s > self.k {
            return Err(Error::InvalidConfig(format!("need 1 <= s <= k, got k = {}, s = {}", self.k, self.s)));
        }
        if self.max_cycles == 0 {
            return Err(Error::InvalidConfig("max_cycles must be at least 1".into()));
        }
        if self.k + self.s > n {
            return Err(Error::InvalidConfig(format!(
                "k + s = {} exceeds the observation dimension n = {n}",
                self.k + self.s
            )));
        }
        if m <= self.k {
            return Err(Error::InvalidSparsity { k: self.k, m });
        }
        Ok(())
    }
}

/// `|⟨φ_i, v⟩| / ‖φ_i‖` for every atom.
fn normalized_correlations<T: Real>(dict: &Dictionary<T>, v: &[T], norms: &[T]) -> Vec<T> {
    (0..dict.m()).map(|i| dot(dict.atom(i), v).abs() / norms[i]).collect()
}

/// Indices of the `count` largest values among `candidates`; ties go to the
/// lower index. Output is in descending score order.
fn top_by_score<T: Real>(scores: &[T], candidates: impl Iterator<Item = usize>, count: usize) -> Vec<usize> {
    let mut c: Vec<usize> = candidates.collect();
    c.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    c.truncate(count);
    c
}

/// Factorization of the `k` atoms most correlated with `y`. Atoms that are
/// numerically dependent on better-ranked ones are passed over.
fn initial_factorization<T: Real>(dict: &Dictionary<T>, y: &[T], k: usize, norms: &[T]) -> Result<UpdatableQR<T>> {
    let corr = normalized_correlations(dict, y, norms);
    let order = top_by_score(&corr, 0..dict.m(), dict.m());
    let mut qr = UpdatableQR::empty(dict.n());
    for i in order {
        if qr.len() == k {
            break;
        }
        match qr.insert_column(dict.atom(i), i) {
            Ok(()) | Err(Error::RankDeficient(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if qr.len() < k {
        return Err(Error::RankDeficient(format!("could not find {k} independent atoms")));
    }
    // initialization is not counted as an update
    let ids = qr.col_ids().to_vec();
    UpdatableQR::new(dict.matrix(), &ids)
}

/// Tracks the best iterate and the stall / repeat conditions.
struct Progress<T> {
    best_ids: Vec<usize>,
    best_x: Vec<T>,
    best_res: T,
    last_res: T,
    seen: HashSet<Vec<usize>>,
}

enum Verdict {
    Continue,
    Stop,
}

impl<T: Real> Progress<T> {
    fn new(qr: &UpdatableQR<T>, x: Vec<T>, res: T) -> Self {
        let mut seen = HashSet::new();
        seen.insert(sorted(qr.col_ids()));
        Self { best_ids: qr.col_ids().to_vec(), best_x: x, best_res: res, last_res: res, seen }
    }

    fn record(&mut self, qr: &UpdatableQR<T>, x: Vec<T>, res: T) -> Verdict {
        if res < self.best_res {
            self.best_res = res;
            self.best_ids = qr.col_ids().to_vec();
            self.best_x = x;
        }
        let repeated = !self.seen.insert(sorted(qr.col_ids()));
        let stalled = self.last_res - res <= T::lit(STALL_TOL) * self.last_res;
        self.last_res = res;
        if repeated || stalled {
            Verdict::Stop
        } else {
            Verdict::Continue
        }
    }

    fn finish(self, cycles: usize, updates: usize) -> RecoveryOutcome<T> {
        RecoveryOutcome::from_unsorted(&self.best_ids, &self.best_x, self.best_res, cycles, updates)
    }
}

fn sorted(ids: &[usize]) -> Vec<usize> {
    let mut v = ids.to_vec();
    v.sort_unstable();
    v
}

/// Stepwise Regression with Replacement.
///
/// Each cycle performs `s` forward-stepwise insertions (smallest next
/// residual) followed by `s` backward-stepwise deletions (smallest residual
/// increase) on the enlarged set.
pub fn srr<T: Real>(dict: &Dictionary<T>, y: &[T], cfg: &SrrConfig) -> Result<RecoveryOutcome<T>> {
    dict.check_target(y)?;
    cfg.validate(dict.n(), dict.m())?;
    let norms = dict.atom_norms();
    let mut qr = initial_factorization(dict, y, cfg.k, &norms)?;
    qr.enable_inverse_tracking()?;
    let (x, res) = qr.solve_ls(y)?;
    let mut progress = Progress::new(&qr, x, res);

    let mut cycles = 0;
    while cycles < cfg.max_cycles {
        cycles += 1;
        for _ in 0..cfg.s {
            let r = qr.residual(y);
            let i = best_insertion(dict, &qr, &r, InsertionRule::Stepwise)
                .ok_or_else(|| Error::RankDeficient("no atom outside the active span".into()))?;
            qr.insert_column(dict.atom(i), i)?;
        }
        for _ in 0..cfg.s {
            let (x, _) = qr.solve_ls(y)?;
            let scores = deletion_scores(&qr, &x)?;
            let pos = argmin_by_id(scores.values(), qr.col_ids()).expect("nonempty active set");
            let id = qr.col_ids()[pos];
            qr.remove_column(id)?;
        }
        let (x, res) = qr.solve_ls(y)?;
        if let Verdict::Stop = progress.record(&qr, x, res) {
            break;
        }
    }
    Ok(progress.finish(cycles, qr.updates()))
}

/// Subspace Pursuit: per cycle, add the `k` atoms best correlated with the
/// residual, fit on the `2k` union, keep the `k` largest coefficients and
/// refit. Stops as soon as a cycle fails to lower the residual.
pub fn subspace_pursuit<T: Real>(
    dict: &Dictionary<T>,
    y: &[T],
    k: usize,
    max_cycles: usize,
) -> Result<RecoveryOutcome<T>> {
    dict.check_target(y)?;
    if k == 0 || 2 * k > dict.n() {
        return Err(Error::InvalidConfig(format!(
            "subspace pursuit needs 1 <= 2k <= n, got k = {k}, n = {}",
            dict.n()
        )));
    }
    if k >= dict.m() {
        return Err(Error::InvalidSparsity { k, m: dict.m() });
    }
    if max_cycles == 0 {
        return Err(Error::InvalidConfig("max_cycles must be at least 1".into()));
    }
    let norms = dict.atom_norms();
    let mut qr = initial_factorization(dict, y, k, &norms)?;
    let (x, res) = qr.solve_ls(y)?;
    let mut progress = Progress::new(&qr, x, res);

    let mut cycles = 0;
    while cycles < max_cycles {
        cycles += 1;
        let r = qr.residual(y);
        let corr = normalized_correlations(dict, &r, &norms);
        let order = top_by_score(&corr, (0..dict.m()).filter(|&i| qr.position(i).is_none()), dict.m());
        let mut added = 0;
        for i in order {
            if added == k {
                break;
            }
            match qr.insert_column(dict.atom(i), i) {
                Ok(()) => added += 1,
                Err(Error::RankDeficient(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let (x, _) = qr.solve_ls(y)?;
        let ids = qr.col_ids().to_vec();
        let mags: Vec<T> = x.iter().map(|v| v.abs()).collect();
        let mut by_id = vec![T::zero(); dict.m()];
        for (&id, &v) in ids.iter().zip(&mags) {
            by_id[id] = v;
        }
        let keep = top_by_score(&by_id, ids.iter().copied(), k);
        for id in ids.into_iter().filter(|id| !keep.contains(id)) {
            qr.remove_column(id)?;
        }
        let (x, res) = qr.solve_ls(y)?;
        if let Verdict::Stop = progress.record(&qr, x, res) {
            break;
        }
    }
    Ok(progress.finish(cycles, qr.updates()))
}

/// Orthogonal Matching Pursuit with Replacement.
///
/// Each cycle takes one gradient step `z = x + η Φᵀ r` on the least-squares
/// objective, admits the `s` outside atoms with the largest `|z_i|`, prunes the
/// enlarged set back to the `k` largest `|z_i|`, and refits.
pub fn ompr<T: Real>(
    dict: &Dictionary<T>,
    y: &[T],
    k: usize,
    s: usize,
    step: T,
    max_cycles: usize,
) -> Result<RecoveryOutcome<T>> {
    dict.check_target(y)?;
    if s == 0 || s > k {
        return Err(Error::InvalidConfig(format!("need 1 <= s <= k, got k = {k}, s = {s}")));
    }
    if k > dict.n() {
        return Err(Error::InvalidConfig(format!("k = {k} exceeds n = {}", dict.n())));
    }
    if k >= dict.m() {
        return Err(Error::InvalidSparsity { k, m: dict.m() });
    }
    if max_cycles == 0 {
        return Err(Error::InvalidConfig("max_cycles must be at least 1".into()));
    }
    let norms = dict.atom_norms();
    let mut qr = initial_factorization(dict, y, k, &norms)?;
    let (x, res) = qr.solve_ls(y)?;
    let mut progress = Progress::new(&qr, x.clone(), res);
    let mut x = x;

    let mut cycles = 0;
    while cycles < max_cycles {
        cycles += 1;
        let r = qr.residual(y);
        let mut z: Vec<T> = (0..dict.m()).map(|i| step * dot(dict.atom(i), &r)).collect();
        for (&id, &xi) in qr.col_ids().iter().zip(&x) {
            z[id] += xi;
        }
        let mags: Vec<T> = z.iter().map(|v| v.abs()).collect();
        let admitted = top_by_score(&mags, (0..dict.m()).filter(|&i| qr.position(i).is_none()), s);
        let union: Vec<usize> = qr.col_ids().iter().copied().chain(admitted.iter().copied()).collect();
        let keep = top_by_score(&mags, union.iter().copied(), k);

        let dropped: Vec<usize> = qr.col_ids().iter().copied().filter(|id| !keep.contains(id)).collect();
        for id in dropped {
            qr.remove_column(id)?;
        }
        let entering: Vec<usize> = keep.iter().copied().filter(|&id| qr.position(id).is_none()).collect();
        for id in entering {
            match qr.insert_column(dict.atom(id), id) {
                Ok(()) | Err(Error::RankDeficient(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let (xn, res) = qr.solve_ls(y)?;
        x = xn.clone();
        if let Verdict::Stop = progress.record(&qr, xn, res) {
            break;
        }
    }
    Ok(progress.finish(cycles, qr.updates()))
}
