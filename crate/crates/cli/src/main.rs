//! `stepwise` command-line tool: sparse recovery, certificate checks and the
//! recovery experiments.
//!
//! Exit codes: 0 success (or certificate holds), 1 certificate does not hold,
//! 2 usage or configuration error, 3 numerical failure, 4 IO error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use stepwise::bench::{self, Algorithm, Config, PhaseConfig, PhaseGrid, StabilityConfig, StabilityCurve};
use stepwise::certs::{certify, check_support, CertificateReport};
use stepwise::textio::{read_matrix, read_vector};
use stepwise::{ActiveSet, Certificate, Dictionary64, Error, RecoveryOutcome64};

const EXIT_FAILS: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "stepwise", version, about = "Greedy sparse recovery with certificates")]
struct Cli {
    /// Base seed for the experiment commands (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file: the report for recover/check, the CSV for phase/stability.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Experiment config file (phase, stability).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recover a sparse support for TARGET in the dictionary MATRIX.
    Recover {
        matrix: PathBuf,
        target: PathBuf,
        #[arg(long, value_enum)]
        algorithm: SolverArg,
        #[arg(long)]
        k: usize,
        /// Replacement step for srr and ompr.
        #[arg(long, default_value_t = 1)]
        s: usize,
    },
    /// Check the recovery certificate of a given support.
    Check {
        matrix: PathBuf,
        target: PathBuf,
        /// Atom indices separated by commas or spaces, e.g. "0,2,5".
        support: String,
    },
    /// Run a phase-transition grid and write it as CSV.
    Phase {
        /// Also render a PNG heatmap per algorithm next to the CSV.
        #[arg(long)]
        heatmap: bool,
    },
    /// Run the stability and runtime benchmark and write it as CSV.
    Stability,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolverArg {
    Br,
    Lace,
    Fr,
    Omp,
    Sp,
    Ompr,
    Srr,
}

impl From<SolverArg> for Algorithm {
    fn from(a: SolverArg) -> Self {
        match a {
            SolverArg::Br => Algorithm::Br,
            SolverArg::Lace => Algorithm::Lace,
            SolverArg::Fr => Algorithm::Fr,
            SolverArg::Omp => Algorithm::Omp,
            SolverArg::Sp => Algorithm::Sp,
            SolverArg::Ompr => Algorithm::Ompr,
            SolverArg::Srr => Algorithm::Srr,
        }
    }
}

/// A failure with its exit code and one-line diagnostic.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } => EXIT_IO,
            e if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_CONFIG, msg: msg.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Recover { matrix, target, algorithm, k, s } => {
            let (dict, y) = load_problem(matrix, target)?;
            let alg = Algorithm::from(*algorithm);
            let out = alg.run(&dict, &y, *k, *s)?;
            let (out, _) = certify(&dict, &y, out);
            emit(cli, &recover_report(alg, &out))?;
            Ok(0)
        }
        Command::Check { matrix, target, support } => {
            let (dict, y) = load_problem(matrix, target)?;
            let ids = parse_support(support)?;
            let set = ActiveSet::new(ids, dict.m())?;
            let rep = check_support(&dict, &y, &set)?;
            emit(cli, &check_report(&rep))?;
            Ok(if rep.holds { 0 } else { EXIT_FAILS })
        }
        Command::Phase { heatmap } => {
            let cfg = PhaseConfig::from_config(&load_config(cli)?)?;
            let grid = bench::run_phase_grid(&cfg)?;
            let path = cli.output.clone().unwrap_or_else(|| PathBuf::from("phase.csv"));
            let written = bench::export_grid(&grid, &path, *heatmap)?;
            print!("{}", phase_summary(&grid));
            for p in written {
                println!("wrote {}", p.display());
            }
            Ok(0)
        }
        Command::Stability => {
            let cfg = StabilityConfig::from_config(&load_config(cli)?)?;
            let curve = bench::run_stability(&cfg)?;
            let path = cli.output.clone().unwrap_or_else(|| PathBuf::from("stability.csv"));
            bench::export_stability(&curve, &path)?;
            print!("{}", stability_summary(&curve));
            println!("wrote {}", path.display());
            Ok(0)
        }
    }
}

fn load_problem(matrix: &Path, target: &Path) -> Result<(Dictionary64, Vec<f64>), Failure> {
    let dict = Dictionary64::new(read_matrix(matrix)?)?;
    let y = read_vector(target)?;
    if y.len() != dict.n() {
        return Err(usage(format!("target has {} entries but the matrix has {} rows", y.len(), dict.n())));
    }
    Ok((dict, y))
}

fn load_config(cli: &Cli) -> Result<Config, Failure> {
    let path = cli.config.as_ref().ok_or_else(|| usage("this command needs --config <file>"))?;
    let mut cfg = Config::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.set("seed", seed)?;
    }
    Ok(cfg)
}

fn parse_support(text: &str) -> Result<Vec<usize>, Failure> {
    let ids: Vec<usize> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| usage(format!("malformed support index `{t}`"))))
        .collect::<Result<_, _>>()?;
    if ids.is_empty() {
        return Err(usage("support list is empty"));
    }
    Ok(ids)
}

/// Prints the report and, with `--output`, also writes it to that file.
fn emit(cli: &Cli, report: &str) -> Result<(), Failure> {
    print!("{report}");
    if let Some(path) = &cli.output {
        std::fs::write(path, report).map_err(|e| Failure::from(Error::Io { path: path.clone(), source: e }))?;
    }
    Ok(())
}

fn join<T: std::fmt::Debug>(v: &[T]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
}

fn recover_report(alg: Algorithm, out: &RecoveryOutcome64) -> String {
    let cert = match out.certificate {
        Certificate::Proven => "proven",
        Certificate::Unproven => "unproven",
    };
    format!(
        "algorithm: {alg}\nsupport: {}\ncoefficients: {}\nresidual_norm: {:?}\niterations: {}\nqr_updates: {}\ncertificate: {cert}\n",
        join(out.support()),
        join(&out.coefficients),
        out.residual_norm,
        out.iterations,
        out.qr_updates,
    )
}

fn check_report(rep: &CertificateReport<f64>) -> String {
    format!(
        "bound: {:?}\nresidual_norm: {:?}\nsigma_min: {:?}\nmin_abs_coeff: {:?}\nholds: {}\n",
        rep.bound, rep.residual_norm, rep.sigma_min, rep.min_abs_coeff, rep.holds
    )
}

fn phase_summary(grid: &PhaseGrid) -> String {
    let mut s = String::new();
    for (a, alg) in grid.algorithms.iter().enumerate() {
        let _ = writeln!(s, "{alg}: recovery frequency, rows {} / columns {}", grid.axis1_name, grid.axis2_name);
        let _ = write!(s, "{:>10}", "");
        for v in &grid.axis2 {
            let _ = write!(s, " {v:>7.3}");
        }
        s.push('\n');
        for (i, v1) in grid.axis1.iter().enumerate() {
            let _ = write!(s, "{v1:>10.3}");
            for j in 0..grid.axis2.len() {
                let _ = write!(s, " {:>7.3}", grid.frequency_at(a, i, j));
            }
            s.push('\n');
        }
    }
    s
}

fn stability_summary(curve: &StabilityCurve) -> String {
    let mut s = format!("{:<10} {:>6} {:>16} {:>14}\n", "algorithm", "m", "median_runtime_s", "median_error");
    for p in &curve.points {
        let _ = writeln!(
            s,
            "{:<10} {:>6} {:>16.6} {:>14.3e}",
            p.algorithm.name(),
            p.m,
            p.median_runtime(),
            p.median_error()
        );
    }
    s
}
