mod common;

use common::*;
use stepwise::bench::{
    export_grid, export_stability, import_grid, naive_br, naive_deletion_costs, normal_br, run_phase_grid,
    run_stability, Algorithm, Config, GridAxis, PhaseConfig, StabilityConfig, PHASE_HEADER, STABILITY_HEADER,
};
use stepwise::greedy::backward_regression;
use stepwise::linalg::UpdatableQR;
use stepwise::synth::{make_instance, rng_from_seed, InstanceSpec};
use stepwise::{Error, Instance64};

fn small_grid(sigma: Vec<f64>, delta: Vec<f64>, trials: usize, algorithms: Vec<Algorithm>) -> PhaseConfig {
    PhaseConfig {
        n: 12,
        m: 12,
        k: 4,
        s: 1,
        sigma_min: sigma,
        axis2: GridAxis::Delta(delta),
        delta: 0.0,
        trials,
        seed: 3,
        algorithms,
    }
}

#[test]
fn naive_costs_match_refits() {
    let mut rng = rng_from_seed(50);
    let d = gaussian_dict(10, 6, &mut rng);
    let y = gaussian_vector(10, &mut rng);
    let ids: Vec<usize> = (0..6).collect();
    let qr = UpdatableQR::new(d.matrix(), &ids).unwrap();
    let full = residual_sq(d.matrix(), &ids, &y);
    for (pos, c) in naive_deletion_costs(&qr, &y).into_iter().enumerate() {
        let rest: Vec<usize> = ids.iter().copied().filter(|&j| j != pos).collect();
        assert!(rel_close(c, residual_sq(d.matrix(), &rest, &y) - full, 1e-9, 1e-13));
    }
}

#[test]
fn reference_variants_agree_with_backward_regression() {
    for seed in 0..20 {
        let spec = InstanceSpec { n: 12, m: 12, k: 3, sigma_min: 0.1, delta: 0.05, seed };
        let inst: Instance64 = make_instance(&spec).unwrap();
        let br = backward_regression(&inst.dict, &inst.y, 3).unwrap();
        let naive = naive_br(&inst.dict, &inst.y, 3).unwrap();
        let normal = normal_br(&inst.dict, &inst.y, 3).unwrap();
        assert_eq!(naive.support(), br.support());
        assert_eq!(normal.support(), br.support());
        for (a, b) in normal.coefficients.iter().zip(&br.coefficients) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

#[test]
fn grid_csv_shape_and_round_trip() {
    let cfg = small_grid(vec![0.2, 1.0], vec![0.0, 0.3], 4, vec![Algorithm::Br, Algorithm::Omp]);
    let grid = run_phase_grid(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let written = export_grid(&grid, &path, true).unwrap();
    assert_eq!(written.len(), 3);
    assert!(written.iter().all(|p| p.exists()));
    assert!(dir.path().join("grid_br.png").exists());

    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 2 * 4);
    assert_eq!(lines[0], PHASE_HEADER.join(","));
    for row in &lines[1..] {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f.len(), 8);
        assert_eq!(f[1], "sigma_min");
        assert_eq!(f[3], "delta");
        let (t, s, freq): (f64, f64, f64) = (f[5].parse().unwrap(), f[6].parse().unwrap(), f[7].parse().unwrap());
        assert_eq!(freq, s / t);
    }

    let back = import_grid(&path).unwrap();
    assert_eq!(back.axis1, grid.axis1);
    assert_eq!(back.axis2, grid.axis2);
    assert_eq!(back.algorithms, grid.algorithms);
    for a in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(back.successes(a, i, j), grid.successes(a, i, j));
            }
        }
    }
}

#[test]
fn grids_are_deterministic() {
    let cfg = small_grid(vec![0.1, 0.5], vec![0.0, 0.2, 0.4], 6, vec![Algorithm::Lace, Algorithm::Fr]);
    assert_eq!(run_phase_grid(&cfg).unwrap(), run_phase_grid(&cfg).unwrap());
}

#[test]
fn noiseless_backward_recovery_is_exact() {
    let cfg = small_grid(vec![0.05, 0.5, 1.0], vec![0.0], 16, vec![Algorithm::Br, Algorithm::Lace]);
    let grid = run_phase_grid(&cfg).unwrap();
    for i in 0..3 {
        assert_eq!(grid.frequency(Algorithm::Br, i, 0), Some(1.0));
        assert_eq!(grid.frequency(Algorithm::Lace, i, 0), Some(1.0));
    }
}

#[test]
fn frequency_falls_with_noise() {
    let trials = 48;
    let cfg = small_grid(vec![0.3], vec![0.0, 0.3, 0.6, 1.2], trials, vec![Algorithm::Br]);
    let grid = run_phase_grid(&cfg).unwrap();
    let slack = 3.0 / (trials as f64).sqrt();
    for j in 1..4 {
        let (a, b) = (grid.frequency_at(0, 0, j - 1), grid.frequency_at(0, 0, j));
        assert!(b <= a + slack, "{a} -> {b}");
    }
    assert!(grid.frequency_at(0, 0, 3) < grid.frequency_at(0, 0, 0));
}

#[test]
fn sparsity_axis_from_config() {
    let c = Config::parse("n = 16\nm = 24\nsigma_min_list = 0.5, 1\nk_list = 2, 4\ntrials = 3\nalgorithms = sp, srr_k")
        .unwrap();
    let cfg = PhaseConfig::from_config(&c).unwrap();
    assert_eq!(cfg.axis2, GridAxis::Sparsity(vec![2, 4]));
    let grid = run_phase_grid(&cfg).unwrap();
    assert_eq!(grid.axis2_name, "k");
    assert_eq!(grid.algorithms, vec![Algorithm::Sp, Algorithm::SrrK]);
}

#[test]
fn invalid_grids_are_rejected() {
    let mut cfg = small_grid(vec![0.5], vec![0.0], 2, vec![Algorithm::Br]);
    cfg.m = 20;
    assert!(matches!(run_phase_grid(&cfg), Err(Error::InvalidConfig(_))));
    let cfg = small_grid(vec![1.5], vec![0.0], 2, vec![Algorithm::Br]);
    assert!(run_phase_grid(&cfg).is_err());
    let cfg = small_grid(vec![0.5], vec![0.0], 0, vec![Algorithm::Br]);
    assert!(run_phase_grid(&cfg).is_err());
}

#[test]
fn stability_curve_and_csv() {
    let cfg = StabilityConfig {
        sizes: vec![12, 24],
        k: 3,
        condition_number: 1e4,
        trials: 3,
        reps: 5,
        seed: 1,
        algorithms: vec![Algorithm::Br, Algorithm::NormalBr],
    };
    let curve = run_stability(&cfg).unwrap();
    assert_eq!(curve.points.len(), 4);
    let p = curve.point(Algorithm::Br, 24).unwrap();
    assert_eq!(p.runtimes.len(), 5);
    assert_eq!(p.errors.len(), 3);
    assert!(p.median_error() < 1e-8);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    export_stability(&curve, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], STABILITY_HEADER.join(","));
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("br,12,"));
}
