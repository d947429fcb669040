//! Runtime and accuracy of backward elimination as the problem grows:
//! noiseless `k`-sparse problems on square dictionaries with a fixed
//! condition number.

use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::Config;
use super::{parse_algorithms, Algorithm};
use crate::error::{Error, Result};
use crate::linalg::{norm, sub};
use crate::model::{RecoveryOutcome, SparseSignal};
use crate::synth::{derive_seed, make_instance, Instance, InstanceSpec};

/// Minimum timed repetitions per point.
pub const MIN_REPS: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityConfig {
    /// Values of `m = n`, strictly increasing.
    pub sizes: Vec<usize>,
    pub k: usize,
    /// `σ_max / σ_min` of every dictionary (`σ_max = 1`).
    pub condition_number: f64,
    /// Instances per size for the error statistic.
    pub trials: usize,
    /// Timed repetitions per point, after one untimed warm-up.
    pub reps: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            sizes: vec![64, 128, 256],
            k: 16,
            condition_number: 1e8,
            trials: 10,
            reps: MIN_REPS,
            seed: 0,
            algorithms: vec![Algorithm::Br, Algorithm::NaiveBr, Algorithm::NormalBr, Algorithm::Lace],
        }
    }
}

impl StabilityConfig {
    pub fn from_config(c: &Config) -> Result<Self> {
        let d = Self::default();
        let algorithms = match c.names("algorithms") {
            Some(names) => parse_algorithms(&names)?,
            None => d.algorithms,
        };
        let cfg = Self {
            sizes: c.list_usize("sizes")?.ok_or_else(|| bad("missing key `sizes`"))?,
            k: c.get_or("k", d.k)?,
            condition_number: c.get_or("condition_number", d.condition_number)?,
            trials: c.get_or("trials", d.trials)?,
            reps: c.get_or("reps", d.reps)?,
            seed: c.get_or("seed", d.seed)?,
            algorithms,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("`sizes` must be nonempty and strictly increasing"));
        }
        if self.k == 0 || self.sizes[0] <= self.k {
            return Err(bad(format!("need 1 <= k < m for every size, got k = {}", self.k)));
        }
        if !(self.condition_number >= 1.0) || !self.condition_number.is_finite() {
            return Err(bad("`condition_number` must be finite and >= 1"));
        }
        if self.trials == 0 {
            return Err(bad("`trials` must be positive"));
        }
        if self.reps < MIN_REPS {
            return Err(bad(format!("`reps` must be at least {MIN_REPS}")));
        }
        if let Some(a) = self.algorithms.iter().find(|a| !a.is_backward()) {
            return Err(bad(format!("`{a}` is not a backward elimination method")));
        }
        Ok(())
    }

    fn instance(&self, size_index: usize, m: usize, trial: usize) -> Result<Instance<f64>> {
        make_instance(&InstanceSpec {
            n: m,
            m,
            k: self.k,
            sigma_min: 1.0 / self.condition_number,
            delta: 0.0,
            seed: derive_seed(self.seed, size_index as u64, trial as u64),
        })
    }
}

/// Measurements of one algorithm at one size.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityPoint {
    pub algorithm: Algorithm,
    pub m: usize,
    /// Wall-clock seconds of each timed repetition.
    pub runtimes: Vec<f64>,
    /// `‖x̂ − x‖₂` per trial; infinite when the algorithm failed.
    pub errors: Vec<f64>,
}

impl StabilityPoint {
    pub fn median_runtime(&self) -> f64 {
        median(&self.runtimes)
    }

    pub fn median_error(&self) -> f64 {
        median(&self.errors)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityCurve {
    pub sizes: Vec<usize>,
    pub points: Vec<StabilityPoint>,
}

impl StabilityCurve {
    pub fn point(&self, alg: Algorithm, m: usize) -> Option<&StabilityPoint> {
        self.points.iter().find(|p| p.algorithm == alg && p.m == m)
    }
}

/// Median of a nonempty sample (mean of the two central values for even
/// lengths). NaN sorts last.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty sample");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let h = v.len() / 2;
    if v.len() % 2 == 1 {
        v[h]
    } else {
        (v[h - 1] + v[h]) / 2.0
    }
}

/// `‖x̂ − x‖₂` over all `m` coordinates; infinite for a failed run.
pub fn solution_error(outcome: &Result<RecoveryOutcome<f64>>, signal: &SparseSignal<f64>) -> f64 {
    match outcome {
        Ok(o) => {
            let e = norm(&sub(&o.to_dense(signal.m()), &signal.to_dense()));
            if e.is_finite() {
                e
            } else {
                f64::INFINITY
            }
        }
        Err(_) => f64::INFINITY,
    }
}

/// Runs every algorithm on `trials` instances per size for the error
/// statistic, then times `reps` repetitions on the first instance, which the
/// error pass has already warmed up. Error trials may run in parallel; timed runs are sequential.
pub fn run_stability(cfg: &StabilityConfig) -> Result<StabilityCurve> {
    cfg.validate()?;
    let mut points = Vec::new();
    for (si, &m) in cfg.sizes.iter().enumerate() {
        let instances: Vec<Instance<f64>> =
            (0..cfg.trials).into_par_iter().map(|t| cfg.instance(si, m, t)).collect::<Result<_>>()?;
        for &alg in &cfg.algorithms {
            let errors: Vec<f64> = instances
                .par_iter()
                .map(|inst| solution_error(&alg.run(&inst.dict, &inst.y, cfg.k, 1), &inst.signal))
                .collect();
            // the error pass above doubles as the warm-up run on instances[0]
            let inst = &instances[0];
            let runtimes = (0..cfg.reps)
                .map(|_| {
                    let t0 = Instant::now();
                    let out = std::hint::black_box(alg.run(&inst.dict, &inst.y, cfg.k, 1));
                    let dt = t0.elapsed().as_secs_f64();
                    drop(out);
                    dt
                })
                .collect();
            points.push(StabilityPoint { algorithm: alg, m, runtimes, errors });
        }
    }
    Ok(StabilityCurve { sizes: cfg.sizes.clone(), points })
}

pub const STABILITY_HEADER: [&str; 4] = ["algorithm", "m", "median_runtime_s", "median_error"];

pub fn export_stability(curve: &StabilityCurve, path: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::io(path, e);
    let file = File::create(path).map_err(io)?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(BufWriter::new(file));
    let csv_err = |e: csv::Error| Error::io(path, e.into());
    w.write_record(STABILITY_HEADER).map_err(csv_err)?;
    for p in &curve.points {
        w.write_record([
            p.algorithm.name().to_string(),
            p.m.to_string(),
            p.median_runtime().to_string(),
            p.median_error().to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| io(e.into_error()))?.flush().map_err(io)
}
