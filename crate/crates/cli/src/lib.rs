//! Experiment commands behind the `gsss` binary.
//!
//! Each `cmd_*` function validates its inputs, runs one experiment, writes
//! the result as CSV or JSON and returns it. Every output is a deterministic
//! function of the arguments, including the seed.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gsss::contraction::{
    estimate_dobrushin_coupled, wasserstein_decay_experiment, CouplingReport, DecayReport, RateTable,
};
use gsss::diagnostics::{mean_iat, mean_iat_of};
use gsss::format::g17;
use gsss::rng::derive_seed;
use gsss::stats::mean_std;
use gsss::{run_chain, ChainTrace, Kernel, TargetDensity, UnitVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod dims;

pub use dims::{Dims, MAX_DIM};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gsss::Error),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error("d = {d}, rep = {rep}: {source}")]
    Run {
        d: usize,
        rep: usize,
        #[source]
        source: gsss::Error,
    },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) | CliError::Run { source: e, .. } => e.kind(),
            CliError::InvalidRange(_) => "InvalidRange",
            CliError::InvalidArgument(_) => "InvalidArgument",
            CliError::Io { .. } => "Io",
        }
    }

    /// `{"error": {"kind": ..., "message": ...}}`
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Destination of a command's primary output.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Output {
    #[default]
    Stdout,
    File(PathBuf),
}

impl Output {
    pub fn from_arg(path: Option<PathBuf>) -> Self {
        match path {
            Some(p) if p.as_os_str() != "-" => Output::File(p),
            _ => Output::Stdout,
        }
    }

    fn write_with(&self, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
        match self {
            Output::Stdout => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                f(&mut lock).and_then(|_| lock.flush()).map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
            }
            Output::File(path) => write_file(path, f),
        }
    }

    /// `dir/stem{suffix}.{ext}` next to the output file.
    fn sibling(&self, suffix: &str, ext: &str) -> Option<PathBuf> {
        match self {
            Output::Stdout => None,
            Output::File(p) => {
                let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                Some(p.with_file_name(format!("{stem}{suffix}.{ext}")))
            }
        }
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let io_err = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(io_err)
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

/// Rate bound table over `dims`.
pub fn cmd_rate_table(dims: &Dims, format: Format, output: &Output) -> Result<RateTable> {
    dims.validate(MAX_DIM)?;
    let table = RateTable::new(dims.0.iter().copied())?;
    output.write_with(|w| match format {
        Format::Csv => table.write_csv(w),
        Format::Json => write_json(w, &table),
    })?;
    Ok(table)
}

/// Marginal series whose IAT is averaged in an IAT sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    /// The coordinates `(x_n)_i` themselves.
    #[default]
    Component,
    /// Squared coordinates `(x_n)_i^2`.
    Squared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub dims: Dims,
    pub n_its: usize,
    pub n_rep: usize,
    pub seed: u64,
    pub statistic: Statistic,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            dims: Dims((1..=10).map(|k| 1 << k).collect()),
            n_its: 10_000,
            n_rep: 10,
            seed: 42,
            statistic: Statistic::Component,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub d: usize,
    pub rep: usize,
    pub seed: u64,
    pub mean_iat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepAggregate {
    pub d: usize,
    pub mean_of_means: f64,
    pub stddev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub statistic: Statistic,
    pub n_its: usize,
    pub runs: Vec<SweepRun>,
    pub aggregate: Vec<SweepAggregate>,
}

impl Sweep {
    pub fn aggregate_at(&self, d: usize) -> Option<&SweepAggregate> {
        self.aggregate.iter().find(|a| a.d == d)
    }

    fn write_runs_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "d,rep,seed,mean_iat")?;
        for r in &self.runs {
            writeln!(w, "{},{},{},{}", r.d, r.rep, r.seed, g17(r.mean_iat))?;
        }
        Ok(())
    }

    fn write_aggregate_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "d,mean_of_means,stddev")?;
        for a in &self.aggregate {
            writeln!(w, "{},{},{}", a.d, g17(a.mean_of_means), g17(a.stddev))?;
        }
        Ok(())
    }
}

/// Seed of repetition `rep` at dimension `d`.
pub fn sweep_run_seed(seed: u64, d: usize, rep: usize) -> u64 {
    derive_seed(derive_seed(seed, d as u64), rep as u64)
}

/// Mean-IAT sweep: `n_rep` constant-kernel chains of length `n_its` from
/// `e_1` (no burn-in) per dimension.
///
/// CSV output writes the per-run table to the output path and the aggregate
/// to `<stem>_aggregate.csv` beside it; on stdout the two tables are
/// separated by a blank line. JSON output holds both.
pub fn cmd_iat_sweep(config: &SweepConfig, format: Format, output: &Output) -> Result<Sweep> {
    config.dims.validate(MAX_DIM)?;
    if config.n_rep == 0 {
        return Err(CliError::InvalidArgument("--reps must be positive".into()));
    }
    if config.n_its < 8 {
        return Err(CliError::InvalidArgument("--iters must be at least 8".into()));
    }
    let items: Vec<(usize, usize)> = config
        .dims
        .0
        .iter()
        .flat_map(|&d| (0..config.n_rep).map(move |rep| (d, rep)))
        .collect();
    let runs: Vec<SweepRun> = items
        .par_iter()
        .map(|&(d, rep)| {
            let seed = sweep_run_seed(config.seed, d, rep);
            let wrap = |source| CliError::Run { d, rep, source };
            let init = UnitVector::basis(d, 0).map_err(wrap)?;
            let trace = run_chain(&init, config.n_its, &Kernel::Constant, seed).map_err(wrap)?;
            let report = match config.statistic {
                Statistic::Component => mean_iat(&trace),
                Statistic::Squared => mean_iat_of(&trace, |x| x * x),
            }
            .map_err(wrap)?;
            log::info!("iat-sweep d={d} rep={rep} mean_iat={:.4}", report.mean_iat);
            Ok(SweepRun {
                d,
                rep,
                seed,
                mean_iat: report.mean_iat,
            })
        })
        .collect::<Result<_>>()?;

    let aggregate = config
        .dims
        .0
        .iter()
        .map(|&d| {
            let values: Vec<f64> = runs.iter().filter(|r| r.d == d).map(|r| r.mean_iat).collect();
            let (mean_of_means, stddev) = mean_std(&values);
            SweepAggregate {
                d,
                mean_of_means,
                stddev,
            }
        })
        .collect();
    let sweep = Sweep {
        statistic: config.statistic,
        n_its: config.n_its,
        runs,
        aggregate,
    };

    match (format, output) {
        (Format::Json, _) => output.write_with(|w| write_json(w, &sweep))?,
        (Format::Csv, Output::Stdout) => output.write_with(|w| {
            sweep.write_runs_csv(w)?;
            writeln!(w)?;
            sweep.write_aggregate_csv(w)
        })?,
        (Format::Csv, Output::File(_)) => {
            output.write_with(|w| sweep.write_runs_csv(w))?;
            let agg = output.sibling("_aggregate", "csv").expect("file output");
            write_file(&agg, |w| sweep.write_aggregate_csv(w))?;
        }
    }
    Ok(sweep)
}

/// Rotation-coupling estimate of the contraction coefficient.
pub fn cmd_couple(
    d: usize,
    alpha: f64,
    n_samples: usize,
    seed: u64,
    format: Format,
    output: &Output,
) -> Result<CouplingReport> {
    let report = estimate_dobrushin_coupled(d, alpha, n_samples, seed)?;
    output.write_with(|w| match format {
        Format::Json => write_json(w, &report),
        Format::Csv => {
            writeln!(w, "d,alpha,n_samples,estimate,std_error,rate_bound,seed")?;
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                report.d,
                g17(report.alpha),
                report.n_samples,
                g17(report.estimate),
                g17(report.std_error),
                g17(report.rate_bound),
                report.seed
            )
        }
    })?;
    Ok(report)
}

/// Built-in densities selectable with `--density`.
#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    Constant,
    Hemisphere,
    ExpLinear(f64),
}

impl FromStr for DensitySpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "constant" => return Ok(DensitySpec::Constant),
            "hemisphere" | "hemisphere-indicator" => return Ok(DensitySpec::Hemisphere),
            _ => {}
        }
        if let Some(kappa) = s.strip_prefix("exp-linear").map(|k| k.trim_start_matches([':', '='])) {
            let kappa: f64 = kappa
                .parse()
                .map_err(|_| CliError::InvalidArgument(format!("bad kappa in {s:?}")))?;
            if kappa.is_finite() {
                return Ok(DensitySpec::ExpLinear(kappa));
            }
        }
        Err(CliError::InvalidArgument(format!(
            "unknown density {s:?}; expected constant, hemisphere or exp-linear:<kappa>"
        )))
    }
}

impl DensitySpec {
    pub fn target(&self) -> TargetDensity {
        match self {
            DensitySpec::Constant => TargetDensity::constant(1.0),
            DensitySpec::Hemisphere => TargetDensity::hemisphere(),
            DensitySpec::ExpLinear(kappa) => TargetDensity::exp_linear(*kappa),
        }
    }
}

#[derive(Serialize)]
struct TraceJson<'a> {
    #[serde(flatten)]
    metadata: gsss::sampler::TraceMetadata,
    states: Vec<&'a [f64]>,
}

/// Runs one chain from `e_1` and writes it. Without `density` the constant
/// kernel is used; with it, ideal slice sampling for that density.
///
/// CSV output to a file also writes the JSON sidecar `<stem>.json`.
pub fn cmd_sample(
    d: usize,
    n_its: usize,
    seed: u64,
    density: Option<&DensitySpec>,
    format: Format,
    output: &Output,
) -> Result<ChainTrace> {
    let kernel = match density {
        None => Kernel::Constant,
        Some(spec) => Kernel::Ideal(spec.target()),
    };
    let init = UnitVector::basis(d, 0)?;
    let trace = run_chain(&init, n_its, &kernel, seed)?;
    match format {
        Format::Csv => {
            output.write_with(|w| trace.write_csv(w))?;
            if let Some(sidecar) = output.sibling("", "json") {
                write_file(&sidecar, |w| write_json(w, &trace.metadata()))?;
            }
        }
        Format::Json => output.write_with(|w| {
            write_json(
                w,
                &TraceJson {
                    metadata: trace.metadata(),
                    states: trace.states().collect(),
                },
            )
        })?,
    }
    Ok(trace)
}

/// Wasserstein decay of `n_samples` chains started at `e_1`.
pub fn cmd_decay(
    d: usize,
    n_samples: usize,
    n_steps: usize,
    seed: u64,
    format: Format,
    output: &Output,
) -> Result<DecayReport> {
    let report = wasserstein_decay_experiment(d, n_samples, n_steps, seed)?;
    for row in &report.rows {
        log::info!("decay step={} w1={:.5} excess={:.5}", row.step, row.w1, row.excess);
    }
    output.write_with(|w| match format {
        Format::Csv => report.write_csv(w),
        Format::Json => write_json(w, &report),
    })?;
    Ok(report)
}
