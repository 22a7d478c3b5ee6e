//! The `gust` command-line tool.
//!
//! Every command prints one JSON document to stdout (or CSV with
//! `--format csv`). Wall-clock timings live under `metadata` so that the
//! `result` part is byte-identical across identical invocations.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::aggregate::{aggregate, AggregateError, MatrixResult, Summary};
use crate::analysis::bounds::{
    expected_colors_bound, expected_execution_bound, expected_utilization, utilization_from_bounds,
    BoundError, BoundInputs,
};
use crate::analysis::energy::{EnergyError, EnergyModel};
use crate::analysis::montecarlo::{check_bounds, EnsembleCheck};
use crate::analysis::stats::{log_log_slope, log_space};
use crate::baselines::{compare, BaselineError, CompareOptions, ComparisonRow, DesignId};
use crate::matio::{
    generate, read_matrix_market, read_vector, reference_spmv, write_matrix_market_file,
    write_vector_file, DenseVector, Distribution, MatrixError, SparseMatrix, SynthSpec,
    DEFAULT_ZIPF_EXPONENT,
};
use crate::scheduler::{
    format, naive_issue_trace, schedule, verify_schedule, window_bounds, ColoringMethod,
    ScheduleError, ScheduleFile, ScheduleMode, VerifyFailure,
};
use crate::simgust::{simulate, simulate_naive, SimError, SimReport};

/// Environment variable naming the default energy-model file.
pub const ENERGY_CONFIG_ENV: &str = "GUST_ENERGY_CONFIG";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{message}")]
    Verify {
        message: String,
        detail: Option<serde_json::Value>,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn verify(message: impl Into<String>) -> Self {
        CliError::Verify {
            message: message.into(),
            detail: None,
        }
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::InvalidSpec(_) | MatrixError::DimensionMismatch { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<ScheduleError> for CliError {
    fn from(e: ScheduleError) -> Self {
        match e {
            ScheduleError::ZeroLength => CliError::Usage(e.to_string()),
            ScheduleError::SlotConflict { .. } => CliError::verify(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::DimensionMismatch { .. } => CliError::Usage(e.to_string()),
            SimError::Collision { .. } | SimError::Malformed(_) => CliError::verify(e.to_string()),
        }
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::UnknownDesign(_) => CliError::Usage(e.to_string()),
            BaselineError::Schedule(e) => e.into(),
            BaselineError::Sim(e) => e.into(),
        }
    }
}

impl From<EnergyError> for CliError {
    fn from(e: EnergyError) -> Self {
        match e {
            EnergyError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<AggregateError> for CliError {
    fn from(e: AggregateError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gust",
    version,
    about = "Edge-coloring SpMV scheduler and datapath simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Uniform,
    PowerLaw,
    KRegular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Naive,
    Ec,
    EcLb,
}

impl From<ModeArg> for ScheduleMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Naive => ScheduleMode::Naive,
            ModeArg::Ec => ScheduleMode::Ec,
            ModeArg::EcLb => ScheduleMode::EcLb,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColoringArg {
    Greedy,
    Exact,
}

impl From<ColoringArg> for ColoringMethod {
    fn from(c: ColoringArg) -> Self {
        match c {
            ColoringArg::Greedy => ColoringMethod::Greedy,
            ColoringArg::Exact => ColoringMethod::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepArg {
    Density,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic square matrix in Matrix Market format.
    Gen(GenArgs),
    /// Schedule a matrix and write the schedule (JSON, or packed if the path ends in .bin).
    Schedule(ScheduleArgs),
    /// Run a schedule on the datapath model.
    Simulate(SimulateArgs),
    /// Compare designs on matrices or over a synthetic density sweep.
    Compare(CompareArgs),
    /// Evaluate the expected-value bounds, optionally against a Monte-Carlo ensemble.
    Bound(BoundArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub dist: DistArg,
    #[arg(long)]
    pub n: usize,
    /// Nonzero probability (uniform, power-law).
    #[arg(long)]
    pub density: Option<f64>,
    /// Nonzeros per row (k-regular).
    #[arg(long)]
    pub k: Option<usize>,
    /// Zipf exponent of power-law row degrees.
    #[arg(long, default_value_t = DEFAULT_ZIPF_EXPONENT)]
    pub exponent: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short = 'l', long)]
    pub length: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::EcLb)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = ColoringArg::Greedy)]
    pub coloring: ColoringArg,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(short, long)]
    pub schedule: PathBuf,
    /// Input vector, one value per line; all ones if omitted.
    #[arg(long)]
    pub vector: Option<PathBuf>,
    /// Where to write the output vector.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Where to write the JSON report; it is also printed.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Cross-check against a reference SpMV of this matrix.
    #[arg(long, requires = "matrix")]
    pub verify: bool,
    #[arg(short, long)]
    pub matrix: Option<PathBuf>,
    /// Maximum relative error accepted by `--verify`.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Matrix files; repeat for a suite summary.
    #[arg(short, long, conflicts_with = "sweep")]
    pub input: Vec<PathBuf>,
    #[arg(short = 'l', long, default_value_t = 256)]
    pub length: usize,
    /// Comma-separated design names.
    #[arg(long, value_delimiter = ',')]
    pub designs: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = ColoringArg::Greedy)]
    pub coloring: ColoringArg,
    /// Energy-model file; defaults to $GUST_ENERGY_CONFIG, then built-in values.
    #[arg(long)]
    pub energy_config: Option<PathBuf>,
    /// Clock frequency in Hz, overriding the energy model's.
    #[arg(long)]
    pub frequency: Option<f64>,
    #[arg(long, value_enum)]
    pub sweep: Option<SweepArg>,
    #[arg(long, value_enum, default_value_t = DistArg::Uniform, requires = "sweep")]
    pub dist: DistArg,
    #[arg(long, requires = "sweep")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1e-3, requires = "sweep")]
    pub density_min: f64,
    #[arg(long, default_value_t = 3e-2, requires = "sweep")]
    pub density_max: f64,
    #[arg(long, default_value_t = 8, requires = "sweep")]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(short = 'l', long)]
    pub length: usize,
    /// Number of seeded uniform samples to test the bounds against.
    #[arg(long)]
    pub montecarlo: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Significance of the one-sided t-test.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    result: T,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
    metadata: Metadata,
}

#[derive(Serialize)]
struct Metadata {
    elapsed_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    preprocessing_s: Option<f64>,
}

fn emit_json<T: Serialize>(
    out: &mut dyn Write,
    command: &str,
    result: T,
    warnings: Vec<String>,
    metadata: Metadata,
) -> Result<(), CliError> {
    let env = Envelope {
        command,
        result,
        warnings,
        metadata,
    };
    serde_json::to_writer_pretty(&mut *out, &env)?;
    writeln!(out)?;
    Ok(())
}

fn emit_csv<T: Serialize>(
    out: &mut dyn Write,
    rows: impl IntoIterator<Item = T>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

// gen

#[derive(Serialize)]
struct GenResult {
    output: String,
    rows: usize,
    cols: usize,
    nnz: usize,
    density: f64,
    spec: SynthSpec,
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    let need_density = || {
        a.density.ok_or_else(|| {
            CliError::Usage(format!("--density is required for --dist {:?}", a.dist))
        })
    };
    let dist = match a.dist {
        DistArg::Uniform => Distribution::Uniform {
            density: need_density()?,
        },
        DistArg::PowerLaw => Distribution::PowerLaw {
            density: need_density()?,
            exponent: a.exponent,
        },
        DistArg::KRegular => Distribution::KRegular {
            degree: a
                .k
                .ok_or_else(|| CliError::Usage("--k is required for --dist k-regular".into()))?,
        },
    };
    let spec = SynthSpec {
        dist,
        n: a.n,
        seed: a.seed,
    };
    let m = generate(&spec)?;
    write_matrix_market_file(&m, &a.output)?;
    let result = GenResult {
        output: a.output.display().to_string(),
        rows: m.rows(),
        cols: m.cols(),
        nnz: m.nnz(),
        density: m.density(),
        spec,
    };
    match a.format {
        OutputFormat::Json => emit_json(
            out,
            "gen",
            result,
            vec![],
            Metadata {
                elapsed_s: start.elapsed().as_secs_f64(),
                preprocessing_s: None,
            },
        ),
        OutputFormat::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                output: &'a str,
                rows: usize,
                cols: usize,
                nnz: usize,
                density: f64,
            }
            emit_csv(
                out,
                [Row {
                    output: &result.output,
                    rows: result.rows,
                    cols: result.cols,
                    nnz: result.nnz,
                    density: result.density,
                }],
            )
        }
    }
}

// schedule

#[derive(Debug, Clone, Serialize)]
struct ScheduleStats {
    mode: ScheduleMode,
    coloring: Option<ColoringMethod>,
    l: usize,
    rows: usize,
    cols: usize,
    nnz: usize,
    windows: usize,
    /// Σ C_w (colored) or Σ issue cycles (naive).
    total_timesteps: usize,
    max_window_timesteps: usize,
    mean_window_timesteps: f64,
    /// Σ of per-window max row/lane degrees under the schedule's layout.
    lower_bound_total: usize,
    predicted_cycles: usize,
    stall_cycles: Option<usize>,
    output: Option<String>,
}

fn schedule_stats(file: &ScheduleFile, m: &SparseMatrix, output: Option<&Path>) -> ScheduleStats {
    let (mode, coloring, l, per_window, bounds, stalls) = match file {
        ScheduleFile::Colored(s) => {
            let per: Vec<usize> = s.windows.iter().map(|w| w.colors).collect();
            (
                s.mode,
                Some(s.coloring),
                s.l,
                per,
                window_bounds(m, &s.layout()),
                None,
            )
        }
        ScheduleFile::Naive(s) => {
            let trace = naive_issue_trace(s);
            let layout = crate::scheduler::Layout::identity(m, s.l);
            (
                ScheduleMode::Naive,
                None,
                s.l,
                trace.window_cycles,
                window_bounds(m, &layout),
                Some(trace.stall_cycles),
            )
        }
    };
    let total: usize = per_window.iter().sum();
    ScheduleStats {
        mode,
        coloring,
        l,
        rows: m.rows(),
        cols: m.cols(),
        nnz: m.nnz(),
        windows: per_window.len(),
        total_timesteps: total,
        max_window_timesteps: per_window.iter().copied().max().unwrap_or(0),
        mean_window_timesteps: if per_window.is_empty() {
            0.0
        } else {
            total as f64 / per_window.len() as f64
        },
        lower_bound_total: bounds.iter().sum(),
        predicted_cycles: total + crate::scheduler::DRAIN_CYCLES,
        stall_cycles: stalls,
        output: output.map(|p| p.display().to_string()),
    }
}

fn verify_failure(failure: Option<VerifyFailure>) -> CliError {
    let detail = failure.as_ref().and_then(|f| serde_json::to_value(f).ok());
    CliError::Verify {
        message: format!(
            "schedule verification failed: {}",
            detail.as_ref().map_or("unknown".into(), |d| d.to_string())
        ),
        detail,
    }
}

fn cmd_schedule(a: ScheduleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    let m = read_matrix_market(&a.input)?;
    let pre = Instant::now();
    let file = schedule(&m, a.length, a.mode.into(), a.coloring.into())?;
    let preprocessing_s = pre.elapsed().as_secs_f64();
    if let ScheduleFile::Colored(s) = &file {
        let report = verify_schedule(s, &m);
        if !report.passed {
            return Err(verify_failure(report.failure));
        }
    }
    if let Some(path) = &a.output {
        format::save(&file, path)?;
    }
    let stats = schedule_stats(&file, &m, a.output.as_deref());
    let metadata = Metadata {
        elapsed_s: start.elapsed().as_secs_f64(),
        preprocessing_s: Some(preprocessing_s),
    };
    match a.format {
        OutputFormat::Json => emit_json(out, "schedule", stats, vec![], metadata),
        OutputFormat::Csv => emit_csv(out, [stats]),
    }
}

// simulate

#[derive(Debug, Clone, Copy, Serialize)]
struct VerifyOutcome {
    max_relative_error: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct SimulateResult {
    report: SimReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    verify: Option<VerifyOutcome>,
}

/// Largest `|a - b| / |b|` over elements, with `|b|` floored at 1 so that
/// zero references are compared absolutely.
pub fn max_relative_error(y: &[f64], reference: &[f64]) -> f64 {
    y.iter()
        .zip(reference)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max)
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    let file = format::load(&a.schedule)?;
    let n = match &file {
        ScheduleFile::Colored(s) => s.n,
        ScheduleFile::Naive(s) => s.n,
    };
    let v = match &a.vector {
        Some(p) => read_vector(p)?,
        None => DenseVector::ones(n),
    };
    let (y, report) = match &file {
        ScheduleFile::Colored(s) => simulate(s, &v)?,
        ScheduleFile::Naive(s) => simulate_naive(s, &v)?,
    };
    if let Some(p) = &a.output {
        write_vector_file(&y, p)?;
    }
    if let Some(p) = &a.report {
        std::fs::write(p, serde_json::to_string_pretty(&report)?)?;
    }
    let verify = match (a.verify, &a.matrix) {
        (true, Some(path)) => {
            let m = read_matrix_market(path)?;
            let r = reference_spmv(&m, &v)?;
            if r.len() != y.len() {
                return Err(CliError::Usage(format!(
                    "matrix has {} rows but the schedule produced {}",
                    r.len(),
                    y.len()
                )));
            }
            let err = max_relative_error(y.as_slice(), r.as_slice());
            Some(VerifyOutcome {
                max_relative_error: err,
                tolerance: a.tolerance,
                passed: err <= a.tolerance,
            })
        }
        _ => None,
    };
    let failed = verify.as_ref().is_some_and(|v| !v.passed);
    let metadata = Metadata {
        elapsed_s: start.elapsed().as_secs_f64(),
        preprocessing_s: None,
    };
    match a.format {
        OutputFormat::Json => emit_json(
            out,
            "simulate",
            SimulateResult {
                report: report.clone(),
                verify,
            },
            vec![],
            metadata,
        )?,
        OutputFormat::Csv => {
            #[derive(Serialize)]
            struct Row {
                mode: ScheduleMode,
                l: usize,
                m: usize,
                n: usize,
                nnz: usize,
                total_cycles: usize,
                utilization: f64,
                stall_cycles: usize,
                flops: usize,
                checksum: String,
                max_relative_error: Option<f64>,
                verified: Option<bool>,
            }
            emit_csv(
                out,
                [Row {
                    mode: report.mode,
                    l: report.l,
                    m: report.m,
                    n: report.n,
                    nnz: report.nnz,
                    total_cycles: report.total_cycles,
                    utilization: report.utilization,
                    stall_cycles: report.stall_cycles,
                    flops: report.flops,
                    checksum: report.checksum.clone(),
                    max_relative_error: verify.as_ref().map(|v| v.max_relative_error),
                    verified: verify.as_ref().map(|v| v.passed),
                }],
            )?;
        }
    }
    if failed {
        let v = verify.expect("failed implies verify ran");
        return Err(CliError::verify(format!(
            "output differs from reference: max relative error {:e} > {:e}",
            v.max_relative_error, v.tolerance
        )));
    }
    Ok(())
}

// compare

fn parse_designs(
    names: Option<&[String]>,
    default: &[DesignId],
) -> Result<Vec<DesignId>, CliError> {
    match names {
        None => Ok(default.to_vec()),
        Some(list) => {
            let ids = list
                .iter()
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.parse::<DesignId>())
                .collect::<Result<Vec<_>, _>>()?;
            if ids.is_empty() {
                return Err(CliError::Usage("--designs is empty".into()));
            }
            Ok(ids)
        }
    }
}

fn energy_model(path: Option<&Path>, frequency: Option<f64>) -> Result<EnergyModel, CliError> {
    let env_path = std::env::var_os(ENERGY_CONFIG_ENV)
        .filter(|p| !p.is_empty())
        .map(PathBuf::from);
    let mut model = match path.map(Path::to_path_buf).or(env_path) {
        Some(p) => EnergyModel::load(&p)?,
        None => EnergyModel::default(),
    };
    if let Some(f) = frequency {
        model.frequency_hz = f;
        model.validate()?;
    }
    Ok(model)
}

#[derive(Debug, Clone, Serialize)]
struct MatrixComparison {
    matrix: String,
    rows: usize,
    cols: usize,
    nnz: usize,
    density: f64,
    designs: Vec<ComparisonRow>,
}

#[derive(Serialize)]
struct DesignSummary {
    design: DesignId,
    #[serde(flatten)]
    summary: Summary,
}

#[derive(Serialize)]
struct CompareResult {
    l: usize,
    matrices: Vec<MatrixComparison>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    summary: Vec<DesignSummary>,
}

#[derive(Serialize)]
struct SweepResult {
    l: usize,
    n: usize,
    dist: String,
    densities: Vec<f64>,
    points: Vec<MatrixComparison>,
    /// Least-squares slope of ln(speedup over 1D) against ln(density), per design.
    slopes: Vec<SweepSlope>,
}

#[derive(Serialize)]
struct SweepSlope {
    design: DesignId,
    speedups: Vec<f64>,
    log_log_slope: f64,
}

#[derive(Serialize)]
struct CompareCsvRow<'a> {
    matrix: &'a str,
    density: f64,
    design: DesignId,
    length: usize,
    units: usize,
    cycles: u64,
    utilization: f64,
    speedup_vs_1d: f64,
    energy_j: Option<f64>,
    lower_bound: bool,
}

fn csv_rows(mats: &[MatrixComparison]) -> Vec<CompareCsvRow<'_>> {
    mats.iter()
        .flat_map(|mc| {
            mc.designs.iter().map(move |r| CompareCsvRow {
                matrix: &mc.matrix,
                density: mc.density,
                design: r.design,
                length: r.length,
                units: r.units,
                cycles: r.cycles,
                utilization: r.utilization,
                speedup_vs_1d: r.speedup_vs_1d,
                energy_j: r.energy_j,
                lower_bound: r.lower_bound,
            })
        })
        .collect()
}

fn compare_one(
    name: String,
    m: &SparseMatrix,
    designs: &[DesignId],
    opts: CompareOptions,
    energy: &EnergyModel,
) -> Result<MatrixComparison, CliError> {
    Ok(MatrixComparison {
        matrix: name,
        rows: m.rows(),
        cols: m.cols(),
        nnz: m.nnz(),
        density: m.density(),
        designs: compare(m, designs, opts, Some(energy))?,
    })
}

fn cmd_compare(a: CompareArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    if a.length == 0 {
        return Err(CliError::Usage("--length must be at least 1".into()));
    }
    let energy = energy_model(a.energy_config.as_deref(), a.frequency)?;
    let opts = CompareOptions {
        l: a.length,
        coloring: a.coloring.into(),
    };
    let metadata = || Metadata {
        elapsed_s: start.elapsed().as_secs_f64(),
        preprocessing_s: None,
    };

    if a.sweep.is_some() {
        let n =
            a.n.ok_or_else(|| CliError::Usage("--sweep density needs --n".into()))?;
        if !(a.density_min > 0.0 && a.density_max >= a.density_min && a.density_max <= 1.0)
            || a.points < 2
        {
            return Err(CliError::Usage(
                "sweep needs 0 < density-min <= density-max <= 1 and at least 2 points".into(),
            ));
        }
        let designs = parse_designs(a.designs.as_deref(), &[DesignId::Oned, DesignId::GustEcLb])?;
        let densities = log_space(a.density_min, a.density_max, a.points);
        let points = densities
            .par_iter()
            .enumerate()
            .map(|(i, &d)| {
                let dist = match a.dist {
                    DistArg::Uniform => Distribution::Uniform { density: d },
                    DistArg::PowerLaw => Distribution::PowerLaw {
                        density: d,
                        exponent: DEFAULT_ZIPF_EXPONENT,
                    },
                    DistArg::KRegular => Distribution::KRegular {
                        degree: ((d * n as f64).round() as usize).clamp(1, n),
                    },
                };
                let m = generate(&SynthSpec {
                    dist,
                    n,
                    seed: a.seed + i as u64,
                })?;
                compare_one(
                    format!("{:?}-{d:e}", a.dist).to_lowercase(),
                    &m,
                    &designs,
                    opts,
                    &energy,
                )
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let slopes = designs
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != DesignId::Oned)
            .map(|(k, &design)| {
                let speedups: Vec<f64> =
                    points.iter().map(|p| p.designs[k].speedup_vs_1d).collect();
                let achieved: Vec<f64> = points.iter().map(|p| p.density).collect();
                SweepSlope {
                    design,
                    log_log_slope: log_log_slope(&achieved, &speedups),
                    speedups,
                }
            })
            .collect();
        return match a.format {
            OutputFormat::Json => emit_json(
                out,
                "compare",
                SweepResult {
                    l: a.length,
                    n,
                    dist: format!("{:?}", a.dist).to_lowercase(),
                    densities,
                    points,
                    slopes,
                },
                vec![],
                metadata(),
            ),
            OutputFormat::Csv => emit_csv(out, csv_rows(&points)),
        };
    }

    if a.input.is_empty() {
        return Err(CliError::Usage(
            "compare needs --input or --sweep density".into(),
        ));
    }
    let designs = parse_designs(a.designs.as_deref(), &DesignId::ALL)?;
    let matrices = a
        .input
        .iter()
        .map(|p| {
            let m = read_matrix_market(p)?;
            compare_one(p.display().to_string(), &m, &designs, opts, &energy)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let summary = if matrices.len() > 1 {
        designs
            .iter()
            .enumerate()
            .filter_map(|(k, &design)| {
                let results: Vec<MatrixResult> = matrices
                    .iter()
                    .map(|mc| MatrixResult {
                        name: mc.matrix.clone(),
                        utilization: mc.designs[k].utilization,
                        speedup: mc.designs[k].speedup_vs_1d,
                    })
                    .collect();
                aggregate(&results)
                    .ok()
                    .map(|summary| DesignSummary { design, summary })
            })
            .collect()
    } else {
        vec![]
    };
    match a.format {
        OutputFormat::Json => emit_json(
            out,
            "compare",
            CompareResult {
                l: a.length,
                matrices,
                summary,
            },
            vec![],
            metadata(),
        ),
        OutputFormat::Csv => emit_csv(out, csv_rows(&matrices)),
    }
}

// bound

#[derive(Serialize)]
struct BoundResult {
    inputs: BoundInputs,
    expected_colors_bound: f64,
    expected_execution_bound: f64,
    expected_utilization: f64,
    utilization_from_bounds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    montecarlo: Option<MonteCarloResult>,
}

#[derive(Serialize)]
struct MonteCarloResult {
    seed: u64,
    alpha: f64,
    #[serde(flatten)]
    check: EnsembleCheck,
    passed: bool,
}

fn cmd_bound(a: BoundArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    let b = BoundInputs::new(a.n, a.p, a.length)?;
    let warnings: Vec<String> = b.regime_warning().into_iter().collect();
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let montecarlo = match a.montecarlo {
        None => None,
        Some(s) if s < 2 => {
            return Err(CliError::Usage(
                "--montecarlo needs at least 2 samples".into(),
            ))
        }
        Some(s) => {
            let check = check_bounds(&b, s, a.seed, a.alpha)?;
            let passed = check.passed();
            Some(MonteCarloResult {
                seed: a.seed,
                alpha: a.alpha,
                check,
                passed,
            })
        }
    };
    let failed = montecarlo.as_ref().is_some_and(|m| !m.passed);
    let result = BoundResult {
        inputs: b,
        expected_colors_bound: expected_colors_bound(&b),
        expected_execution_bound: expected_execution_bound(&b),
        expected_utilization: expected_utilization(&b),
        utilization_from_bounds: utilization_from_bounds(&b),
        montecarlo,
    };
    let metadata = Metadata {
        elapsed_s: start.elapsed().as_secs_f64(),
        preprocessing_s: None,
    };
    match a.format {
        OutputFormat::Json => emit_json(out, "bound", &result, warnings, metadata)?,
        OutputFormat::Csv => {
            #[derive(Serialize)]
            struct Row {
                n: usize,
                p: f64,
                l: usize,
                expected_colors_bound: f64,
                expected_execution_bound: f64,
                expected_utilization: f64,
                utilization_from_bounds: f64,
                mc_mean_colors: Option<f64>,
                mc_mean_cycles: Option<f64>,
                mc_passed: Option<bool>,
            }
            let mc = result.montecarlo.as_ref();
            emit_csv(
                out,
                [Row {
                    n: b.n,
                    p: b.p,
                    l: b.l,
                    expected_colors_bound: result.expected_colors_bound,
                    expected_execution_bound: result.expected_execution_bound,
                    expected_utilization: result.expected_utilization,
                    utilization_from_bounds: result.utilization_from_bounds,
                    mc_mean_colors: mc.map(|m| m.check.colors.mean),
                    mc_mean_cycles: mc.map(|m| m.check.execution.mean),
                    mc_passed: mc.map(|m| m.passed),
                }],
            )?;
        }
    }
    if failed {
        return Err(CliError::verify("Monte-Carlo sample mean exceeds a bound"));
    }
    Ok(())
}

/// Runs one parsed command, writing its document to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Schedule(a) => cmd_schedule(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Bound(a) => cmd_bound(a, out),
    }
}

/// Parses `args` (program name first), runs, reports errors on stderr and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            if let CliError::Verify {
                detail: Some(d), ..
            } = &e
            {
                eprintln!("{d}");
            }
            e.exit_code()
        }
    }
}
