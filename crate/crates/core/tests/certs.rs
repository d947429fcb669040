mod common;

use common::*;
use stepwise::certs::{
    adaptive_stop_sparsity, babel, check_support, posthoc_check, recovery_bound, sigma_min, sigma_min_active,
};
use stepwise::greedy::{backward_regression, lace};
use stepwise::synth::{haar_orthogonal, make_instance, rng_from_seed, InstanceSpec};
use stepwise::{ActiveSet, Dictionary64, Error, Instance64, Matrix64};

/// `μ₁(k)` by enumerating every atom and every `k`-subset of the others.
fn babel_brute(d: &Dictionary64, k: usize) -> f64 {
    let m = d.m();
    let nd = d.normalized();
    let g = |i: usize, j: usize| nd.atom(i).iter().zip(nd.atom(j)).map(|(a, b)| a * b).sum::<f64>().abs();
    let mut worst: f64 = 0.0;
    for i in 0..m {
        let others: Vec<usize> = (0..m).filter(|&j| j != i).collect();
        for sub in subsets(others.len(), k) {
            worst = worst.max(sub.iter().map(|&p| g(i, others[p])).sum());
        }
    }
    worst
}

#[test]
fn babel_matches_enumeration() {
    let mut rng = rng_from_seed(40);
    let d = gaussian_dict(8, 12, &mut rng);
    let mut last = 0.0;
    for k in 1..12 {
        let ours = babel(&d, k).unwrap();
        assert!((ours - babel_brute(&d, k)).abs() < 1e-12);
        assert!(ours >= last);
        last = ours;
    }
    assert!(matches!(babel(&d, 12), Err(Error::InvalidOrder { .. })));
    assert!(matches!(babel(&d, 0), Err(Error::InvalidOrder { .. })));
}

#[test]
fn babel_is_zero_for_orthonormal_atoms() {
    let mut rng = rng_from_seed(41);
    let q: Matrix64 = haar_orthogonal(6, &mut rng);
    assert!(babel(&Dictionary64::new(q).unwrap(), 3).unwrap() < 1e-14);
}

#[test]
fn sigma_values_match_svd() {
    let mut rng = rng_from_seed(42);
    let d = gaussian_dict(10, 7, &mut rng);
    let s = singular_values(&to_na(d.matrix()));
    assert!((sigma_min(&d) - s[6]).abs() < 1e-12);
    let set = ActiveSet::new(vec![1, 4, 6], 7).unwrap();
    let sub = singular_values(&select_na(d.matrix(), &[1, 4, 6]));
    assert!((sigma_min_active(&d, &set) - sub[2]).abs() < 1e-12);
    assert!((recovery_bound(&d, 0.8).unwrap() - s[6] * 0.4).abs() < 1e-12);
    let wide = gaussian_dict(4, 6, &mut rng);
    assert_eq!(sigma_min(&wide), 0.0);
    assert!(matches!(recovery_bound(&wide, 1.0), Err(Error::RankDeficient(_))));
}

/// Whenever the certificate holds on an exhaustively checkable problem, the
/// certified support is the unique best one of its size.
#[test]
fn certified_supports_are_exhaustively_optimal() {
    let mut certified = 0;
    for seed in 0..200 {
        let spec = InstanceSpec { n: 8, m: 8, k: 3, sigma_min: 0.5, delta: 0.1, seed };
        let inst: Instance64 = make_instance(&spec).unwrap();
        let out = backward_regression(&inst.dict, &inst.y, 3).unwrap();
        if !posthoc_check(&inst.dict, &inst.y, &out).holds {
            continue;
        }
        certified += 1;
        let ours = residual_sq(inst.dict.matrix(), out.support(), &inst.y);
        for s in subsets(8, 3) {
            if s != out.support() {
                assert!(residual_sq(inst.dict.matrix(), &s, &inst.y) > ours);
            }
        }
    }
    assert!(certified >= 50, "only {certified} certified instances");
}

#[test]
fn check_support_reports_the_refit() {
    let d = Dictionary64::new(Matrix64::identity(4)).unwrap();
    let y = [1.0, 0.0, -2.0, 0.1];
    let rep = check_support(&d, &y, &ActiveSet::new(vec![0, 2], 4).unwrap()).unwrap();
    assert_eq!(rep.min_abs_coeff, 1.0);
    assert!((rep.residual_norm - 0.1).abs() < 1e-15);
    assert!(rep.holds);
    let rep = check_support(&d, &y, &ActiveSet::new(vec![0, 3], 4).unwrap()).unwrap();
    assert!(!rep.holds);
}

#[test]
fn adaptive_stop_finds_true_sparsity() {
    let mut rng = rng_from_seed(43);
    let q: Matrix64 = haar_orthogonal(16, &mut rng);
    let pert = gaussian_matrix(16, 16, &mut rng);
    let d = Dictionary64::new(Matrix64::from_fn(16, 16, |i, j| q[(i, j)] + 0.05 * pert[(i, j)])).unwrap();
    let y = d.combine(&[2, 9, 13], &[1.0, -1.0, 1.0]);
    assert_eq!(adaptive_stop_sparsity(&d, &y).unwrap(), 3);
    assert_eq!(backward_regression(&d, &y, 3).unwrap().support(), &[2, 9, 13]);
    assert_eq!(lace(&d, &y, 3).unwrap().support(), &[2, 9, 13]);
}
