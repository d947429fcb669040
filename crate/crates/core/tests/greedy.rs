mod common;

use common::*;
use stepwise::certs::babel;
use stepwise::greedy::{
    backward_path, backward_regression, deletion_scores, forward_regression, lace, omp, DeletionRule,
};
use stepwise::linalg::{dot, sub, UpdatableQR};
use stepwise::synth::{haar_orthogonal, make_noise, rng_from_seed};
use stepwise::{Dictionary64, Error, Matrix64};

fn orthonormal_dict(n: usize, m: usize, seed: u64) -> Dictionary64 {
    let mut rng = rng_from_seed(seed);
    let q: Matrix64 = haar_orthogonal(n, &mut rng);
    Dictionary64::new(q.select_columns(&(0..m).collect::<Vec<_>>())).unwrap()
}

#[test]
fn orthonormal_scores_are_squared_coefficients() {
    let d = orthonormal_dict(6, 4, 1);
    let y = d.atom(0).to_vec();
    let qr = UpdatableQR::new(d.matrix(), &[0, 1, 2, 3]).unwrap();
    let (x, _) = qr.solve_ls(&y).unwrap();
    let s = deletion_scores(&qr, &x).unwrap();
    let expected = [1.0, 0.0, 0.0, 0.0];
    for (a, b) in s.values().iter().zip(expected) {
        assert!((a - b).abs() < 1e-12);
    }
    // an unused atom costs nothing to delete
    let s = deletion_scores(&qr, &[1.0, 0.0, 2.0, 0.0]).unwrap();
    assert_eq!(s.values()[1], 0.0);
}

#[test]
fn scores_match_naive_deletion() {
    let mut rng = rng_from_seed(2);
    let d = gaussian_dict(12, 6, &mut rng);
    let y = gaussian_vector(12, &mut rng);
    let ids: Vec<usize> = (0..6).collect();
    let qr = UpdatableQR::new(d.matrix(), &ids).unwrap();
    let (x, _) = qr.solve_ls(&y).unwrap();
    let scores = deletion_scores(&qr, &x).unwrap();
    let full = residual_sq(d.matrix(), &ids, &y);
    for (pos, &i) in ids.iter().enumerate() {
        let rest: Vec<usize> = ids.iter().copied().filter(|&j| j != i).collect();
        let naive = residual_sq(d.matrix(), &rest, &y) - full;
        assert!(rel_close(scores.values()[pos], naive, 1e-9, 1e-13), "{} vs {naive}", scores.values()[pos]);
    }
}

#[test]
fn backward_steps_are_greedy_optimal_and_monotone() {
    let mut rng = rng_from_seed(3);
    for trial in 0..20 {
        let m = 4 + trial % 9;
        let d = gaussian_dict(m + 2, m, &mut rng);
        let y = gaussian_vector(m + 2, &mut rng);
        let (steps, out) = backward_path(&d, &y, 1, DeletionRule::Backward).unwrap();
        let mut last = -1.0;
        for s in &steps {
            assert!(s.residual_norm >= last - 1e-12);
            last = s.residual_norm;
            let costs: Vec<f64> = s
                .active
                .iter()
                .map(|&i| {
                    let rest: Vec<usize> = s.active.iter().copied().filter(|&j| j != i).collect();
                    residual_sq(d.matrix(), &rest, &y)
                })
                .collect();
            let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
            let chosen = costs[s.active.iter().position(|&i| i == s.removed).unwrap()];
            assert!(chosen <= best * (1.0 + 1e-9) + 1e-13);
        }
        assert!(out.residual_norm >= last - 1e-12);
    }
}

#[test]
fn lace_is_monotone_and_deletes_smallest_coefficient() {
    let mut rng = rng_from_seed(4);
    let d = gaussian_dict(12, 9, &mut rng);
    let y = gaussian_vector(12, &mut rng);
    let (steps, _) = backward_path(&d, &y, 2, DeletionRule::Magnitude).unwrap();
    for w in steps.windows(2) {
        assert!(w[1].residual_norm >= w[0].residual_norm - 1e-12);
    }
    for s in &steps {
        let x = lstsq(d.matrix(), &s.active, &y);
        let (pos, _) = x.iter().enumerate().min_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap();
        assert_eq!(s.active[pos], s.removed);
    }
}

#[test]
fn br_and_lace_coincide_on_orthonormal_atoms() {
    let d = orthonormal_dict(10, 8, 5);
    let mut rng = rng_from_seed(6);
    for _ in 0..10 {
        let y = gaussian_vector(10, &mut rng);
        let (a, oa) = backward_path(&d, &y, 1, DeletionRule::Backward).unwrap();
        let (b, ob) = backward_path(&d, &y, 1, DeletionRule::Magnitude).unwrap();
        let ra: Vec<usize> = a.iter().map(|s| s.removed).collect();
        let rb: Vec<usize> = b.iter().map(|s| s.removed).collect();
        assert_eq!(ra, rb);
        assert_eq!(oa.support(), ob.support());
    }
}

#[test]
fn forward_steps_match_exhaustive_oracles() {
    let mut rng = rng_from_seed(7);
    for _ in 0..10 {
        let d = gaussian_dict(10, 14, &mut rng);
        let y = gaussian_vector(10, &mut rng);
        let mut prev_fr: Vec<usize> = Vec::new();
        let mut prev_omp: Vec<usize> = Vec::new();
        let mut last_res = f64::INFINITY;
        for k in 1..=6 {
            let fr = forward_regression(&d, &y, k).unwrap();
            let added: Vec<usize> = fr.support().iter().copied().filter(|i| !prev_fr.contains(i)).collect();
            assert_eq!(added.len(), 1, "forward paths are nested");
            let cost = |i: usize| {
                let mut s = prev_fr.clone();
                s.push(i);
                residual_sq(d.matrix(), &s, &y)
            };
            let best = (0..14).filter(|i| !prev_fr.contains(i)).map(cost).fold(f64::INFINITY, f64::min);
            assert!(cost(added[0]) <= best * (1.0 + 1e-9) + 1e-13);
            assert!(fr.residual_norm <= last_res + 1e-12);
            last_res = fr.residual_norm;
            prev_fr = fr.support().to_vec();

            let o = omp(&d, &y, k).unwrap();
            let added: Vec<usize> = o.support().iter().copied().filter(|i| !prev_omp.contains(i)).collect();
            assert_eq!(added.len(), 1);
            let x = lstsq(d.matrix(), &prev_omp, &y);
            let r = sub(&y, &d.combine(&prev_omp, &x));
            let corr = |i: usize| dot(d.atom(i), &r).abs();
            let best = (0..14).filter(|i| !prev_omp.contains(i)).map(corr).fold(0.0, f64::max);
            assert!(corr(added[0]) >= best * (1.0 - 1e-12));
            prev_omp = o.support().to_vec();
        }
    }
}

#[test]
fn forward_methods_agree_on_orthonormal_atoms() {
    let d = orthonormal_dict(12, 12, 8);
    let y = d.combine(&[1, 4, 9], &[1.0, -2.0, 0.5]);
    let fr = forward_regression(&d, &y, 3).unwrap();
    let o = omp(&d, &y, 3).unwrap();
    assert_eq!(fr.support(), &[1, 4, 9]);
    assert_eq!(o.support(), fr.support());
    assert!(fr.residual_norm < 1e-12);
}

/// Two coherent unit atoms: both methods take atom 0 first, then OMP takes the
/// orthogonal atom 2 while forward regression takes the coherent atom 1, which
/// leaves the smaller residual.
#[test]
fn omp_and_forward_regression_diverge() {
    let t: f64 = 0.3;
    let a = Matrix64::from_row_major(3, 3, &[1.0, t.cos(), 0.0, 0.0, t.sin(), 0.0, 0.0, 0.0, 1.0]).unwrap();
    let d = Dictionary64::new(a).unwrap();
    let y = [2.0, 0.3, 0.2];
    assert_eq!(omp(&d, &y, 1).unwrap().support(), &[0]);
    assert_eq!(forward_regression(&d, &y, 1).unwrap().support(), &[0]);
    let o = omp(&d, &y, 2).unwrap();
    let f = forward_regression(&d, &y, 2).unwrap();
    assert_eq!(o.support(), &[0, 2]);
    assert_eq!(f.support(), &[0, 1]);
    assert!((f.residual_norm - 0.2).abs() < 1e-12);
    assert!((o.residual_norm - 0.3).abs() < 1e-12);
}

#[test]
fn forward_recovery_on_low_coherence_dictionary() {
    let mut rng = rng_from_seed(9);
    let q: Matrix64 = haar_orthogonal(32, &mut rng);
    let pert = gaussian_matrix(32, 16, &mut rng);
    let a = Matrix64::from_fn(32, 16, |i, j| q[(i, j)] + 0.01 * pert[(i, j)]);
    let d = Dictionary64::new(a).unwrap();
    let k = 3;
    assert!(babel(&d, k).unwrap() < 0.5);
    let noise: Vec<f64> = make_noise(32, 0.05, &mut rng);
    let mut y = d.combine(&[2, 7, 11], &[1.0, -1.0, 1.0]);
    for (yi, e) in y.iter_mut().zip(&noise) {
        *yi += e;
    }
    assert_eq!(forward_regression(&d, &y, k).unwrap().support(), &[2, 7, 11]);
    assert_eq!(omp(&d, &y, k).unwrap().support(), &[2, 7, 11]);
}

#[test]
fn boundaries_and_errors() {
    let d = Dictionary64::new(Matrix64::identity(4)).unwrap();
    let y = [1.0, 0.0, 1.0, 0.0];
    let empty = forward_regression(&d, &y, 0).unwrap();
    assert!(empty.support().is_empty());
    assert!((empty.residual_norm - 2f64.sqrt()).abs() < 1e-15);
    assert!(backward_regression(&d, &y, 0).unwrap().support().is_empty());
    assert!(matches!(backward_regression(&d, &y, 4), Err(Error::InvalidSparsity { .. })));
    assert!(matches!(lace(&d, &y, 5), Err(Error::InvalidSparsity { .. })));
    let wide = Dictionary64::new(Matrix64::from_row_major(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]).unwrap()).unwrap();
    assert!(matches!(backward_regression(&wide, &[1.0, 1.0], 1), Err(Error::RankDeficient(_))));
    let dup =
        Dictionary64::new(Matrix64::from_row_major(3, 3, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap())
            .unwrap();
    assert!(matches!(backward_regression(&dup, &[1.0, 0.0, 0.0], 1), Err(Error::RankDeficient(_))));
    let same = Dictionary64::new(Matrix64::from_row_major(2, 3, &[1.0, 1.0, 1.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
    assert!(matches!(forward_regression(&same, &[1.0, 1.0], 2), Err(Error::RankDeficient(_))));
    assert!(matches!(omp(&d, &[1.0], 1), Err(Error::DimensionMismatch(_))));
}

#[test]
fn results_are_deterministic() {
    let mut rng = rng_from_seed(10);
    let d = gaussian_dict(16, 12, &mut rng);
    let y = gaussian_vector(16, &mut rng);
    for k in [1, 4, 8] {
        assert_eq!(backward_regression(&d, &y, k).unwrap(), backward_regression(&d, &y, k).unwrap());
        assert_eq!(omp(&d, &y, k).unwrap(), omp(&d, &y, k).unwrap());
    }
}

#[test]
fn single_precision_backward_regression() {
    let d = stepwise::Dictionary32::new(stepwise::Matrix32::identity(5)).unwrap();
    let out = backward_regression(&d, &[0.0f32, 3.0, 0.0, -1.0, 0.1], 2).unwrap();
    assert_eq!(out.support(), &[1, 3]);
}
