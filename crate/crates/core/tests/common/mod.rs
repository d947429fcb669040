//! Shared fixtures and dense oracles backed by nalgebra.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use stepwise::linalg::norm;
use stepwise::synth::SynthRng;
use stepwise::{Dictionary64, Matrix64, UpdatableQR64};

pub fn gaussian_matrix(n: usize, m: usize, rng: &mut SynthRng) -> Matrix64 {
    Matrix64::from_fn(n, m, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vector(n: usize, rng: &mut SynthRng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn gaussian_dict(n: usize, m: usize, rng: &mut SynthRng) -> Dictionary64 {
    Dictionary64::new(gaussian_matrix(n, m, rng)).unwrap()
}

pub fn to_na(a: &Matrix64) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

pub fn select_na(a: &Matrix64, ids: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), ids.len(), |i, j| a[(i, ids[j])])
}

/// Least-squares coefficients of `y` on the listed columns via SVD.
pub fn lstsq(a: &Matrix64, ids: &[usize], y: &[f64]) -> Vec<f64> {
    if ids.is_empty() {
        return Vec::new();
    }
    let sub = select_na(a, ids);
    let svd = sub.svd(true, true);
    svd.solve(&DVector::from_column_slice(y), 1e-300).unwrap().as_slice().to_vec()
}

/// `‖y − Φ_A x*‖²` via SVD least squares.
pub fn residual_sq(a: &Matrix64, ids: &[usize], y: &[f64]) -> f64 {
    let yv = DVector::from_column_slice(y);
    if ids.is_empty() {
        return yv.norm_squared();
    }
    let x = DVector::from_vec(lstsq(a, ids, y));
    (yv - select_na(a, ids) * x).norm_squared()
}

pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.as_slice().to_vec();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// All size-`k` subsets of `0..m` in lexicographic order.
pub fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

pub fn rel_close(a: f64, b: f64, rel: f64, abs_floor: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + abs_floor
}

pub fn max_orthogonality_error(qr: &UpdatableQR64) -> f64 {
    let q = qr.q();
    let g = q.transpose().matmul(&q);
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// Largest `|QR − Φ_A|` entry relative to the column norm.
pub fn reconstruction_error(qr: &UpdatableQR64, a: &Matrix64) -> f64 {
    let qrp = qr.q().matmul(&qr.r());
    let mut worst: f64 = 0.0;
    for (j, &id) in qr.col_ids().iter().enumerate() {
        let scale = norm(a.col(id));
        for i in 0..a.nrows() {
            worst = worst.max((qrp[(i, j)] - a[(i, id)]).abs() / scale);
        }
    }
    worst
}

pub fn strictly_lower_is_zero(qr: &UpdatableQR64) -> bool {
    let r = qr.r();
    (0..r.nrows()).all(|i| (0..i).all(|j| r[(i, j)] == 0.0))
}
