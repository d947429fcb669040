//! Recovery experiments: phase-transition grids over problem difficulty,
//! stability and runtime curves over problem size, and the reference
//! backward-regression variants they compare against.

pub mod config;
mod phase;
mod reference;
mod stability;

use std::fmt;
use std::str::FromStr;

pub use config::Config;
pub use phase::{
    export_grid, import_grid, render_heatmap, run_phase_grid, GridAxis, PhaseConfig, PhaseGrid, PHASE_HEADER,
};
pub use reference::{naive_br, naive_deletion_costs, normal_br};
pub use stability::{
    export_stability, median, run_stability, solution_error, StabilityConfig, StabilityCurve, StabilityPoint,
    STABILITY_HEADER,
};

use crate::error::{Error, Result};
use crate::greedy::{backward_regression, forward_regression, lace, omp};
use crate::model::{Dictionary, RecoveryOutcome};
use crate::scalar::Real;
use crate::two_stage::{ompr, srr, subspace_pursuit, SrrConfig, DEFAULT_MAX_CYCLES};

/// Every algorithm the harness can run, with its config-file name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Br,
    Lace,
    Fr,
    Omp,
    Sp,
    Ompr,
    Srr,
    /// SRR with `s = k`.
    SrrK,
    NaiveBr,
    NormalBr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Algorithm::Br,
        Algorithm::Lace,
        Algorithm::Fr,
        Algorithm::Omp,
        Algorithm::Sp,
        Algorithm::Ompr,
        Algorithm::Srr,
        Algorithm::SrrK,
        Algorithm::NaiveBr,
        Algorithm::NormalBr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Br => "br",
            Algorithm::Lace => "lace",
            Algorithm::Fr => "fr",
            Algorithm::Omp => "omp",
            Algorithm::Sp => "sp",
            Algorithm::Ompr => "ompr",
            Algorithm::Srr => "srr",
            Algorithm::SrrK => "srr_k",
            Algorithm::NaiveBr => "naive_br",
            Algorithm::NormalBr => "normal_br",
        }
    }

    /// Backward methods start from every atom and need `m ≤ n`.
    pub fn is_backward(self) -> bool {
        matches!(self, Algorithm::Br | Algorithm::Lace | Algorithm::NaiveBr | Algorithm::NormalBr)
    }

    /// Runs the algorithm for sparsity `k`; `s` is the replacement step of
    /// `srr` and `ompr` and is ignored elsewhere.
    pub fn run<T: Real>(self, dict: &Dictionary<T>, y: &[T], k: usize, s: usize) -> Result<RecoveryOutcome<T>> {
        match self {
            Algorithm::Br => backward_regression(dict, y, k),
            Algorithm::Lace => lace(dict, y, k),
            Algorithm::Fr => forward_regression(dict, y, k),
            Algorithm::Omp => omp(dict, y, k),
            Algorithm::Sp => subspace_pursuit(dict, y, k, DEFAULT_MAX_CYCLES),
            Algorithm::Ompr => ompr(dict, y, k, s, T::one(), DEFAULT_MAX_CYCLES),
            Algorithm::Srr => srr(dict, y, &SrrConfig::new(k, s)),
            Algorithm::SrrK => srr(dict, y, &SrrConfig::full_step(k)),
            Algorithm::NaiveBr => naive_br(dict, y, k),
            Algorithm::NormalBr => normal_br(dict, y, k),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == key)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm `{s}`")))
    }
}

pub(crate) fn parse_algorithms(names: &[String]) -> Result<Vec<Algorithm>> {
    if names.is_empty() {
        return Err(Error::InvalidConfig("no algorithms listed".into()));
    }
    let algs: Vec<Algorithm> = names.iter().map(|n| n.parse()).collect::<Result<_>>()?;
    for (i, a) in algs.iter().enumerate() {
        if algs[..i].contains(a) {
            return Err(Error::InvalidConfig(format!("algorithm `{a}` listed twice")));
        }
    }
    Ok(algs)
}
