//! Problem data shared by all algorithms: the dictionary, sparse signals,
//! active sets and the recovery outcome.

use crate::error::{Error, Result};
use crate::linalg::{norm, Matrix, UpdatableQR};
use crate::scalar::Real;

/// Dense `n x m` dictionary whose columns are the atoms `φ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dictionary<T> {
    data: Matrix<T>,
}

impl<T: Real> Dictionary<T> {
    pub fn new(data: Matrix<T>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::DimensionMismatch("dictionary must be at least 1x1".into()));
        }
        if let Some(j) = data.columns().position(|c| c.iter().all(|&x| x == T::zero())) {
            return Err(Error::InvalidConfig(format!("atom {j} is identically zero")));
        }
        Ok(Self { data })
    }

    /// Observation dimension.
    #[inline]
    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    /// Number of atoms.
    #[inline]
    pub fn m(&self) -> usize {
        self.data.ncols()
    }

    #[inline]
    pub fn atom(&self, i: usize) -> &[T] {
        self.data.col(i)
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.data
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.data
    }

    pub fn atom_norms(&self) -> Vec<T> {
        self.data.column_norms()
    }

    /// True when every atom has unit norm (to `1e3·ε`).
    pub fn is_normalized(&self) -> bool {
        let tol = T::epsilon() * T::lit(1e3);
        self.atom_norms().iter().all(|&c| (c - T::one()).abs() <= tol)
    }

    /// Copy with every atom scaled to unit norm.
    pub fn normalized(&self) -> Self {
        let norms = self.atom_norms();
        let data = Matrix::from_fn(self.n(), self.m(), |i, j| self.data[(i, j)] / norms[j]);
        Self { data }
    }

    /// `Φ x` for a dense coefficient vector of length `m`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.data.mul_vec(x)
    }

    /// `Σ_{i ∈ ids} x_i φ_i`
    pub fn combine(&self, ids: &[usize], coeffs: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n()];
        for (&i, &c) in ids.iter().zip(coeffs) {
            crate::linalg::axpy(c, self.atom(i), &mut out);
        }
        out
    }

    pub(crate) fn check_target(&self, y: &[T]) -> Result<()> {
        if y.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "target has length {}, dictionary has {} rows",
                y.len(),
                self.n()
            )));
        }
        Ok(())
    }
}

/// Sparse vector given by its support and the nonzero values on it.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSignal<T> {
    support: Vec<usize>,
    coefficients: Vec<T>,
    m: usize,
}

impl<T: Real> SparseSignal<T> {
    /// Entries are sorted by index; zero coefficients and duplicate indices are rejected.
    pub fn new(m: usize, entries: impl IntoIterator<Item = (usize, T)>) -> Result<Self> {
        let mut entries: Vec<(usize, T)> = entries.into_iter().collect();
        entries.sort_by_key(|e| e.0);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidSpec(format!("duplicate support index {}", w[0].0)));
            }
        }
        for &(i, v) in &entries {
            if i >= m {
                return Err(Error::InvalidSpec(format!("support index {i} out of range (m = {m})")));
            }
            if v == T::zero() {
                return Err(Error::InvalidSpec(format!("coefficient at {i} is zero")));
            }
        }
        let (support, coefficients) = entries.into_iter().unzip();
        Ok(Self { support, coefficients, m })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    /// `min_{i ∈ S} |x_i|`, or zero for the empty signal.
    pub fn min_abs_coefficient(&self) -> T {
        self.coefficients
            .iter()
            .map(|c| c.abs())
            .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.min(v))))
            .unwrap_or(T::zero())
    }

    pub fn to_dense(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.m];
        for (&i, &v) in self.support.iter().zip(&self.coefficients) {
            x[i] = v;
        }
        x
    }
}

/// Ordered list of distinct atom indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ActiveSet(Vec<usize>);

impl ActiveSet {
    pub fn new(ids: Vec<usize>, m: usize) -> Result<Self> {
        for (k, &i) in ids.iter().enumerate() {
            if i >= m {
                return Err(Error::InvalidConfig(format!("index {i} out of range (m = {m})")));
            }
            if ids[..k].contains(&i) {
                return Err(Error::InvalidConfig(format!("duplicate index {i}")));
            }
        }
        Ok(Self(ids))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// The post-hoc bound holds: the support is the optimal one of its size.
    Proven,
    Unproven,
}

/// Result of a selection algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryOutcome<T> {
    /// Sorted ascending.
    pub active_set: ActiveSet,
    /// Least-squares coefficients aligned with `active_set`.
    pub coefficients: Vec<T>,
    pub residual_norm: T,
    pub iterations: usize,
    /// Column insertions plus deletions applied to the QR factorization.
    pub qr_updates: usize,
    pub certificate: Certificate,
}

impl<T: Real> RecoveryOutcome<T> {
    /// Builds an outcome from coefficients in factorization order, sorting the
    /// support ascending.
    pub(crate) fn from_unsorted(
        ids: &[usize],
        coeffs: &[T],
        residual_norm: T,
        iterations: usize,
        qr_updates: usize,
    ) -> Self {
        let mut pairs: Vec<(usize, T)> = ids.iter().copied().zip(coeffs.iter().copied()).collect();
        pairs.sort_by_key(|p| p.0);
        let (ids, coefficients): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        Self {
            active_set: ActiveSet(ids),
            coefficients,
            residual_norm,
            iterations,
            qr_updates,
            certificate: Certificate::Unproven,
        }
    }

    pub fn support(&self) -> &[usize] {
        self.active_set.ids()
    }

    pub fn min_abs_coefficient(&self) -> T {
        self.coefficients.iter().fold(T::infinity(), |a, c| a.min(c.abs()))
    }

    /// Dense length-`m` coefficient vector.
    pub fn to_dense(&self, m: usize) -> Vec<T> {
        let mut x = vec![T::zero(); m];
        for (&i, &v) in self.support().iter().zip(&self.coefficients) {
            x[i] = v;
        }
        x
    }
}

/// Least-squares residual `r_A = (I − Φ_A Φ_A⁺) y` and its norm.
pub fn residual<T: Real>(dict: &Dictionary<T>, set: &ActiveSet, y: &[T]) -> Result<(Vec<T>, T)> {
    dict.check_target(y)?;
    let qr = UpdatableQR::new(dict.matrix(), set.ids())?;
    let r = qr.residual(y);
    let nr = norm(&r);
    Ok((r, nr))
}

/// Fraction of target energy explained, `1 − ‖r_A‖² / ‖y‖²` (no centering).
pub fn r_squared<T: Real>(dict: &Dictionary<T>, set: &ActiveSet, y: &[T]) -> Result<T> {
    let ny = norm(y);
    if ny == T::zero() {
        return Err(Error::ZeroTarget);
    }
    let (_, nr) = residual(dict, set, y)?;
    let ratio = nr / ny;
    Ok(T::one() - ratio * ratio)
}
