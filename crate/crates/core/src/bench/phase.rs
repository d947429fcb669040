//! Phase-transition grids: empirical frequency of exact support recovery over
//! a two-dimensional grid of problem parameters.

use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::Config;
use super::{parse_algorithms, Algorithm};
use crate::error::{Error, Result};
use crate::synth::{derive_seed, make_instance, InstanceSpec};

/// Second grid axis; the first is always `σ_min`.
#[derive(Clone, Debug, PartialEq)]
pub enum GridAxis {
    /// Noise norms at fixed sparsity.
    Delta(Vec<f64>),
    /// Sparsity levels at a fixed noise norm.
    Sparsity(Vec<usize>),
}

impl GridAxis {
    pub fn name(&self) -> &'static str {
        match self {
            GridAxis::Delta(_) => "delta",
            GridAxis::Sparsity(_) => "k",
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            GridAxis::Delta(v) => v.clone(),
            GridAxis::Sparsity(v) => v.iter().map(|&k| k as f64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            GridAxis::Delta(v) => v.len(),
            GridAxis::Sparsity(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseConfig {
    pub n: usize,
    pub m: usize,
    /// Sparsity when the second axis is `Delta`.
    pub k: usize,
    /// Replacement step of `srr` and `ompr`.
    pub s: usize,
    pub sigma_min: Vec<f64>,
    pub axis2: GridAxis,
    /// Noise norm when the second axis is `Sparsity`.
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

impl PhaseConfig {
    pub fn from_config(c: &Config) -> Result<Self> {
        let n: usize = c.require("n")?;
        let m = c.get_or("m", n)?;
        let sigma_min = c.list_f64("sigma_min_list")?.ok_or_else(|| bad("missing key `sigma_min_list`"))?;
        let deltas = c.list_f64("delta_list")?;
        let (axis2, k, delta) = match (c.list_usize("k_list")?, deltas) {
            (Some(ks), d) => {
                let delta = match d.as_deref() {
                    None => 0.0,
                    Some([d]) => *d,
                    Some(_) => return Err(bad("with `k_list`, `delta_list` must hold a single value")),
                };
                (GridAxis::Sparsity(ks), 0, delta)
            }
            (None, Some(d)) => (GridAxis::Delta(d), c.require("k")?, 0.0),
            (None, None) => return Err(bad("one of `delta_list` or `k_list` is required")),
        };
        let names = c.names("algorithms").ok_or_else(|| bad("missing key `algorithms`"))?;
        let cfg = Self {
            n,
            m,
            k,
            s: c.get_or("s", 1)?,
            sigma_min,
            axis2,
            delta,
            trials: c.require("trials")?,
            seed: c.get_or("seed", 0)?,
            algorithms: parse_algorithms(&names)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn sparsities(&self) -> Vec<usize> {
        match &self.axis2 {
            GridAxis::Delta(_) => vec![self.k],
            GridAxis::Sparsity(ks) => ks.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (n, m) = (self.n, self.m);
        if n == 0 || m == 0 {
            return Err(bad("`n` and `m` must be positive"));
        }
        if self.trials == 0 {
            return Err(bad("`trials` must be positive"));
        }
        if self.sigma_min.is_empty() || self.axis2.is_empty() {
            return Err(bad("grid axes must be nonempty"));
        }
        if let Some(s) = self.sigma_min.iter().find(|&&s| !(s > 0.0 && s <= 1.0)) {
            return Err(bad(format!("sigma_min value {s} outside (0, 1]")));
        }
        let deltas = match &self.axis2 {
            GridAxis::Delta(d) => d.clone(),
            GridAxis::Sparsity(_) => vec![self.delta],
        };
        if let Some(d) = deltas.iter().find(|&&d| !(d >= 0.0)) {
            return Err(bad(format!("delta value {d} is negative")));
        }
        for k in self.sparsities() {
            if k == 0 || k > n.min(m) {
                return Err(bad(format!("sparsity {k} outside 1..={}", n.min(m))));
            }
            for &alg in &self.algorithms {
                let ok = match alg {
                    a if a.is_backward() => m <= n && k < m,
                    Algorithm::Sp | Algorithm::SrrK => 2 * k <= n && k < m,
                    Algorithm::Srr | Algorithm::Ompr => self.s >= 1 && self.s <= k && k + self.s <= n && k < m,
                    _ => true,
                };
                if !ok {
                    return Err(bad(format!(
                        "algorithm `{alg}` cannot run with n = {n}, m = {m}, k = {k}, s = {}",
                        self.s
                    )));
                }
            }
        }
        Ok(())
    }

    fn cell_spec(&self, i: usize, j: usize, trial: usize, cell: usize) -> InstanceSpec {
        let (k, delta) = match &self.axis2 {
            GridAxis::Delta(d) => (self.k, d[j]),
            GridAxis::Sparsity(ks) => (ks[j], self.delta),
        };
        InstanceSpec {
            n: self.n,
            m: self.m,
            k,
            sigma_min: self.sigma_min[i],
            delta,
            seed: derive_seed(self.seed, cell as u64, trial as u64),
        }
    }
}

/// Success counts per algorithm and grid cell.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseGrid {
    pub axis1_name: String,
    pub axis1: Vec<f64>,
    pub axis2_name: String,
    pub axis2: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub trials: usize,
    /// Absent for grids read back from CSV.
    pub base_seed: Option<u64>,
    /// Indexed `[algorithm][axis1][axis2]`, flattened.
    successes: Vec<usize>,
}

impl PhaseGrid {
    pub fn new(
        axis1_name: impl Into<String>,
        axis1: Vec<f64>,
        axis2_name: impl Into<String>,
        axis2: Vec<f64>,
        algorithms: Vec<Algorithm>,
        trials: usize,
        successes: Vec<usize>,
    ) -> Result<Self> {
        if successes.len() != algorithms.len() * axis1.len() * axis2.len() {
            return Err(bad("success table does not match the grid shape"));
        }
        if trials == 0 || successes.iter().any(|&s| s > trials) {
            return Err(bad("success counts must lie in 0..=trials"));
        }
        Ok(Self {
            axis1_name: axis1_name.into(),
            axis1,
            axis2_name: axis2_name.into(),
            axis2,
            algorithms,
            trials,
            base_seed: None,
            successes,
        })
    }

    fn index(&self, alg: usize, i: usize, j: usize) -> usize {
        (alg * self.axis1.len() + i) * self.axis2.len() + j
    }

    pub fn algorithm_index(&self, alg: Algorithm) -> Option<usize> {
        self.algorithms.iter().position(|&a| a == alg)
    }

    pub fn successes(&self, alg: usize, i: usize, j: usize) -> usize {
        self.successes[self.index(alg, i, j)]
    }

    pub fn frequency_at(&self, alg: usize, i: usize, j: usize) -> f64 {
        self.successes(alg, i, j) as f64 / self.trials as f64
    }

    /// Recovery frequency of `alg` at cell `(i, j)`, if the grid contains it.
    pub fn frequency(&self, alg: Algorithm, i: usize, j: usize) -> Option<f64> {
        self.algorithm_index(alg).map(|a| self.frequency_at(a, i, j))
    }

    /// Mean frequency of `alg` over the cells accepted by `keep(axis1, axis2)`.
    pub fn mean_frequency(&self, alg: Algorithm, keep: impl Fn(f64, f64) -> bool) -> Option<f64> {
        let a = self.algorithm_index(alg)?;
        let mut sum = 0.0;
        let mut count = 0usize;
        for (i, &v1) in self.axis1.iter().enumerate() {
            for (j, &v2) in self.axis2.iter().enumerate() {
                if keep(v1, v2) {
                    sum += self.frequency_at(a, i, j);
                    count += 1;
                }
            }
        }
        (count > 0).then(|| sum / count as f64)
    }
}

/// Runs every algorithm on `trials` instances per cell. Cells and trials are
/// distributed over the rayon pool; each instance depends only on the base
/// seed and its `(cell, trial)` coordinates, so results do not depend on
/// scheduling. An algorithm that returns an error counts as a failure.
pub fn run_phase_grid(cfg: &PhaseConfig) -> Result<PhaseGrid> {
    cfg.validate()?;
    let (l1, l2) = (cfg.sigma_min.len(), cfg.axis2.len());
    let units: Vec<(usize, usize)> = (0..l1 * l2).flat_map(|c| (0..cfg.trials).map(move |t| (c, t))).collect();
    let outcomes: Vec<Vec<bool>> = units
        .par_iter()
        .map(|&(cell, trial)| {
            let spec = cfg.cell_spec(cell / l2, cell % l2, trial, cell);
            let inst = make_instance::<f64>(&spec)?;
            Ok(cfg
                .algorithms
                .iter()
                .map(|alg| {
                    alg.run(&inst.dict, &inst.y, spec.k, cfg.s)
                        .map(|o| o.support() == inst.signal.support())
                        .unwrap_or(false)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let na = cfg.algorithms.len();
    let mut successes = vec![0usize; na * l1 * l2];
    for (&(cell, _), hits) in units.iter().zip(&outcomes) {
        for (a, &hit) in hits.iter().enumerate() {
            successes[a * l1 * l2 + cell] += usize::from(hit);
        }
    }
    let mut grid = PhaseGrid::new(
        "sigma_min",
        cfg.sigma_min.clone(),
        cfg.axis2.name(),
        cfg.axis2.values(),
        cfg.algorithms.clone(),
        cfg.trials,
        successes,
    )?;
    grid.base_seed = Some(cfg.seed);
    Ok(grid)
}

pub const PHASE_HEADER: [&str; 8] =
    ["algorithm", "axis1_name", "axis1", "axis2_name", "axis2", "trials", "successes", "frequency"];

/// Writes the grid as CSV, one row per (algorithm, cell). With `heatmaps`, a
/// PNG per algorithm is written next to the CSV as `<stem>_<algorithm>.png`.
/// Returns the paths written.
pub fn export_grid(grid: &PhaseGrid, path: &Path, heatmaps: bool) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| Error::io(path, e);
    let file = File::create(path).map_err(io)?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(BufWriter::new(file));
    let csv_err = |e: csv::Error| Error::io(path, e.into());
    w.write_record(PHASE_HEADER).map_err(csv_err)?;
    for (a, alg) in grid.algorithms.iter().enumerate() {
        for (i, v1) in grid.axis1.iter().enumerate() {
            for (j, v2) in grid.axis2.iter().enumerate() {
                w.write_record([
                    alg.name().to_string(),
                    grid.axis1_name.clone(),
                    v1.to_string(),
                    grid.axis2_name.clone(),
                    v2.to_string(),
                    grid.trials.to_string(),
                    grid.successes(a, i, j).to_string(),
                    grid.frequency_at(a, i, j).to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    w.into_inner().map_err(|e| io(e.into_error()))?.flush().map_err(io)?;

    let mut written = vec![path.to_path_buf()];
    if heatmaps {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("grid");
        for alg in &grid.algorithms {
            let png = path.with_file_name(format!("{stem}_{alg}.png"));
            render_heatmap(grid, *alg, &png)?;
            written.push(png);
        }
    }
    Ok(written)
}

/// Reads a grid written by [`export_grid`]. Axis values keep their order of
/// first appearance.
pub fn import_grid(path: &Path) -> Result<PhaseGrid> {
    let parse_err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.iter().ne(PHASE_HEADER) {
        return Err(parse_err(1, "unexpected header".into()));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| parse_err(line, e.to_string()))?;
        let field = |c: usize| rec.get(c).unwrap_or("").to_string();
        let num = |c: usize| field(c).parse::<f64>().map_err(|_| parse_err(line, format!("bad number `{}`", field(c))));
        let int =
            |c: usize| field(c).parse::<usize>().map_err(|_| parse_err(line, format!("bad count `{}`", field(c))));
        let alg: Algorithm = field(0).parse().map_err(|e: Error| parse_err(line, e.to_string()))?;
        rows.push((alg, field(1), num(2)?, field(3), num(4)?, int(5)?, int(6)?));
    }
    let first = rows.first().ok_or_else(|| parse_err(2, "no data rows".into()))?.clone();
    let mut algorithms = Vec::new();
    let mut axis1 = Vec::new();
    let mut axis2 = Vec::new();
    for row in &rows {
        if row.1 != first.1 || row.3 != first.3 || row.5 != first.5 {
            return Err(parse_err(0, "axis names and trial counts must agree across rows".into()));
        }
        if !algorithms.contains(&row.0) {
            algorithms.push(row.0);
        }
        if !axis1.contains(&row.2) {
            axis1.push(row.2);
        }
        if !axis2.contains(&row.4) {
            axis2.push(row.4);
        }
    }
    let pos = |v: &[f64], x: f64| v.iter().position(|&y| y == x).expect("collected above");
    let mut successes = vec![None; algorithms.len() * axis1.len() * axis2.len()];
    for row in &rows {
        let a = algorithms.iter().position(|&x| x == row.0).expect("collected above");
        let idx = (a * axis1.len() + pos(&axis1, row.2)) * axis2.len() + pos(&axis2, row.4);
        if successes[idx].replace(row.6).is_some() {
            return Err(parse_err(0, "duplicate grid cell".into()));
        }
    }
    let successes = successes
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| parse_err(0, "grid is not fully populated".into()))?;
    PhaseGrid::new(first.1, axis1, first.3, axis2, algorithms, first.5, successes)
}

/// Renders one algorithm's frequencies as a PNG heatmap: `σ_min` grows
/// downwards, the second axis grows to the right, dark is 0 and bright is 1.
pub fn render_heatmap(grid: &PhaseGrid, alg: Algorithm, path: &Path) -> Result<()> {
    const CELL: u32 = 16;
    let a = grid.algorithm_index(alg).ok_or_else(|| bad(format!("algorithm `{alg}` is not part of the grid")))?;
    let (rows, cols) = (grid.axis1.len() as u32, grid.axis2.len() as u32);
    let img = image::RgbImage::from_fn(cols * CELL, rows * CELL, |x, y| {
        let f = grid.frequency_at(a, (y / CELL) as usize, (x / CELL) as usize);
        // dark blue to yellow
        let lerp = |lo: f64, hi: f64| (lo + (hi - lo) * f).round() as u8;
        image::Rgb([lerp(20.0, 250.0), lerp(20.0, 230.0), lerp(90.0, 40.0)])
    });
    img.save_with_format(path, image::ImageFormat::Png).map_err(|e| Error::io(path, std::io::Error::other(e)))
}
