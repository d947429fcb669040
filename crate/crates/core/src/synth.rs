//! Reproducible synthetic problems `y = Φx + ε`.
//!
//! Dictionaries are built as `U S Vᵀ` with Haar-distributed orthogonal `U`,
//! `V` and a spectrum of `min(n, m)` evenly spaced singular values running from
//! `sigma_min` up to 1. Signals have a uniformly random support and Rademacher
//! (±1) coefficients; noise is uniform on the sphere of radius `delta`.
//!
//! Every generator draws from a [`ChaCha8Rng`]. Grid experiments derive one
//! seed per `(cell, trial)` with [`derive_seed`], so an instance depends only on
//! its coordinates and never on execution order.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::dense::householder_qr;
use crate::linalg::{norm, Matrix};
use crate::model::{Dictionary, SparseSignal};
use crate::scalar::Real;

pub type SynthRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SynthRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for trial `trial` of grid cell `cell`.
pub fn derive_seed(base: u64, cell: u64, trial: u64) -> u64 {
    splitmix64(base ^ splitmix64(splitmix64(cell) ^ trial.rotate_left(32)))
}

/// Parameters of one synthetic problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceSpec {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Smallest singular value of the dictionary, in `(0, 1]`.
    pub sigma_min: f64,
    /// Noise norm `‖ε‖₂`.
    pub delta: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidSpec("n and m must be positive".into()));
        }
        if self.k > self.n.min(self.m) {
            return Err(Error::InvalidSpec(format!("k = {} exceeds min(n, m) = {}", self.k, self.n.min(self.m))));
        }
        check_sigma(self.sigma_min)?;
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidSpec(format!("delta = {} must be finite and >= 0", self.delta)));
        }
        Ok(())
    }
}

fn check_sigma(sigma_min: f64) -> Result<()> {
    if !(sigma_min > 0.0 && sigma_min <= 1.0) {
        return Err(Error::InvalidSpec(format!("sigma_min = {sigma_min} must lie in (0, 1]")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance<T> {
    pub dict: Dictionary<T>,
    pub signal: SparseSignal<T>,
    pub noise: Vec<T>,
    pub y: Vec<T>,
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Haar-distributed `n x n` orthogonal matrix: QR of a Gaussian matrix with
/// the factor signs fixed so that `R` has a positive diagonal.
pub fn haar_orthogonal<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    let g = Matrix::from_fn(n, n, |_, _| gaussian::<T, R>(rng));
    // householder_qr already returns the positive-diagonal factorization
    householder_qr(&g).0
}

/// Evenly spaced singular values from `sigma_min` to 1, ascending.
pub fn spectrum<T: Real>(count: usize, sigma_min: T) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![sigma_min],
        _ => {
            let step = (T::one() - sigma_min) / T::from_usize(count - 1).expect("small count");
            (0..count)
                .map(
                    |j| {
                        if j == count - 1 {
                            T::one()
                        } else {
                            sigma_min + step * T::from_usize(j).expect("small index")
                        }
                    },
                )
                .collect()
        }
    }
}

/// `U S Vᵀ` with a prescribed singular spectrum; columns are not normalized.
pub fn make_matrix<T: Real, R: Rng + ?Sized>(n: usize, m: usize, sigma_min: T, rng: &mut R) -> Result<Dictionary<T>> {
    check_sigma(sigma_min.as_f64())?;
    if n == 0 || m == 0 {
        return Err(Error::InvalidSpec("n and m must be positive".into()));
    }
    let u = haar_orthogonal::<T, R>(n, rng);
    let v = haar_orthogonal::<T, R>(m, rng);
    let s = spectrum(n.min(m), sigma_min);
    let mut phi = Matrix::zeros(n, m);
    for j in 0..m {
        let col = phi.col_mut(j);
        for (l, &sl) in s.iter().enumerate() {
            let w = sl * v[(j, l)];
            for (ci, &ui) in col.iter_mut().zip(u.col(l)) {
                *ci += w * ui;
            }
        }
    }
    Dictionary::new(phi)
}

/// `k`-sparse signal with uniform support and ±1 entries.
pub fn make_signal<T: Real, R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> Result<SparseSignal<T>> {
    if k == 0 || k > m {
        return Err(Error::InvalidSpec(format!("sparsity k = {k} must lie in 1..={m}")));
    }
    let support = sample(rng, m, k).into_vec();
    let entries: Vec<(usize, T)> =
        support.into_iter().map(|i| (i, if rng.random_bool(0.5) { T::one() } else { -T::one() })).collect();
    SparseSignal::new(m, entries)
}

/// Vector drawn uniformly from the sphere of radius `delta`.
pub fn make_noise<T: Real, R: Rng + ?Sized>(n: usize, delta: T, rng: &mut R) -> Vec<T> {
    if delta == T::zero() {
        return vec![T::zero(); n];
    }
    loop {
        let g: Vec<T> = (0..n).map(|_| gaussian::<T, R>(rng)).collect();
        let gn = norm(&g);
        if gn > T::zero() {
            return g.into_iter().map(|x| x / gn * delta).collect();
        }
    }
}

/// Deterministic function of `spec` (including its seed).
pub fn make_instance<T: Real>(spec: &InstanceSpec) -> Result<Instance<T>> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let dict = make_matrix(spec.n, spec.m, T::lit(spec.sigma_min), &mut rng)?;
    let signal = if spec.k == 0 { SparseSignal::new(spec.m, [])? } else { make_signal(spec.m, spec.k, &mut rng)? };
    let noise = make_noise(spec.n, T::lit(spec.delta), &mut rng);
    let mut y = dict.combine(signal.support(), signal.coefficients());
    for (yi, &e) in y.iter_mut().zip(&noise) {
        *yi += e;
    }
    Ok(Instance { dict, signal, noise, y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::singular_values;

    #[test]
    fn spectrum_endpoints() {
        assert_eq!(spectrum(5, 0.2_f64).first(), Some(&0.2));
        assert_eq!(spectrum(5, 0.2_f64).last(), Some(&1.0));
        assert_eq!(spectrum(3, 1.0_f64), vec![1.0, 1.0, 1.0]);
        assert_eq!(spectrum(1, 0.5_f64), vec![0.5]);
    }

    #[test]
    fn unit_spectrum_gives_orthogonal_matrix() {
        let mut rng = rng_from_seed(3);
        let d = make_matrix::<f64, _>(6, 6, 1.0, &mut rng).unwrap();
        for s in singular_values(d.matrix()) {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_sigma() {
        let mut rng = rng_from_seed(0);
        assert!(make_matrix::<f64, _>(4, 4, 0.0, &mut rng).is_err());
        assert!(make_matrix::<f64, _>(4, 4, 1.5, &mut rng).is_err());
    }

    #[test]
    fn signal_is_rademacher() {
        let mut rng = rng_from_seed(1);
        let s = make_signal::<f64, _>(10, 10, &mut rng).unwrap();
        assert_eq!(s.support(), (0..10).collect::<Vec<_>>().as_slice());
        assert!(s.coefficients().iter().all(|c| c.abs() == 1.0));
        assert!(make_signal::<f64, _>(3, 4, &mut rng).is_err());
    }

    #[test]
    fn noise_norm() {
        let mut rng = rng_from_seed(2);
        assert_eq!(make_noise::<f64, _>(5, 0.0, &mut rng), vec![0.0; 5]);
        for delta in [1e-6, 0.3, 7.0] {
            let e = make_noise::<f64, _>(9, delta, &mut rng);
            assert!((norm(&e) - delta).abs() <= 1e-14 * delta.max(1.0));
        }
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(7, 0, 1);
        let b = derive_seed(7, 1, 0);
        let c = derive_seed(8, 0, 1);
        assert!(a != b && a != c && b != c);
    }
}
