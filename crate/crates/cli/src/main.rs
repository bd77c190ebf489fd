//! `roc-copula`: joint rule-out / rule-in ROC curves from the command line.

mod commands;
mod modelspec;
mod output;
mod svg;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use roc_copula::fitting::GaussianCalibration;
use roc_copula::jointroc::CurveKind;
use roc_copula::CopulaFamily;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// A theorem check ran and its verdict was FAIL (exit 1).
    Failed(String),
    /// Bad input: schema, domain or precondition violation (exit 2).
    Validation(String),
    /// A numerical routine did not converge (exit 3).
    Numeric(String),
}

impl CliError {
    pub fn from_lib<E: Into<roc_copula::Error>>(e: E) -> Self {
        let e = e.into();
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Validation(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Failed(m) => write!(f, "check failed: {m}"),
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "roc-copula", version, about = "Joint rule-out / rule-in ROC curves for two correlated tests")]
pub struct Cli {
    /// Directory for output files (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Output formats, comma separated; each command has its own default.
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
    /// Seed for simulation; recorded in analysis provenance.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Suppress the summary on standard output.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Worker threads for the parallel loops.
    #[arg(long, global = true, env = "ROC_COPULA_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Model ROC curves for a spec file.
    Curve(CurveArgs),
    /// Sweep a copula parameter and check the pAUC ordering.
    TheoremCheck(TheoremArgs),
    /// Fit, calibrate and project a labelled score dataset.
    Analyze(AnalyzeArgs),
    /// Draw a synthetic dataset from a spec file.
    Simulate(SimulateArgs),
    /// Dependence measures of a copula, or sample correlations of a dataset.
    Dependence(DependenceArgs),
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Model spec JSON.
    pub spec: PathBuf,
    /// Curves to build: a, b, rule-out, rule-in, combined. Defaults to every
    /// curve the spec's thresholds allow.
    #[arg(long, value_delimiter = ',')]
    pub kind: Vec<CurveKind>,
    #[arg(long, default_value_t = roc_copula::jointroc::DEFAULT_CURVE_POINTS)]
    pub points: usize,
    /// Prevalence for PPV/NPV lines in the SVG (overrides the spec).
    #[arg(long)]
    pub prevalence: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    #[value(alias = "rule-out")]
    Ruleout,
    #[value(alias = "rule-in")]
    Rulein,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    #[value(alias = "n")]
    NonDiseased,
    #[value(alias = "d")]
    Diseased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Parameter,
    Tau,
}

#[derive(Debug, Args)]
pub struct TheoremArgs {
    /// Model spec JSON; its `sweep` block is used unless overridden below.
    pub spec: PathBuf,
    #[arg(long, value_enum)]
    pub which: Which,
    #[arg(long, value_enum)]
    pub class: Option<ClassArg>,
    #[arg(long)]
    pub family: Option<CopulaFamily>,
    #[arg(long, value_enum)]
    pub measure: Option<MeasureArg>,
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = roc_copula::jointroc::DEFAULT_CURVE_POINTS)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Dataset CSV with header `case_id,label,score_a,score_b`.
    pub data: PathBuf,
    /// Analysis config JSON; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub families: Vec<CopulaFamily>,
    #[arg(long)]
    pub rule_out_fpf: Option<f64>,
    #[arg(long)]
    pub rule_in_fpf: Option<f64>,
    #[arg(long)]
    pub b_threshold: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub prevalence: Vec<f64>,
    #[arg(long, value_parser = parse_calibration)]
    pub calibration: Option<GaussianCalibration>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Model spec JSON.
    pub spec: PathBuf,
    /// Cases per class (or half the cohort with --prevalence).
    #[arg(long)]
    pub n: usize,
    /// Draw a mixed cohort of 2n cases at this prevalence.
    #[arg(long)]
    pub prevalence: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DependenceArgs {
    #[arg(long, required_unless_present = "data")]
    pub family: Option<CopulaFamily>,
    /// Copula parameter (rho for gaussian, theta otherwise).
    #[arg(long, visible_aliases = ["theta", "rho"], conflicts_with = "tau")]
    pub parameter: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Dataset CSV: report per-class sample correlations instead.
    #[arg(long, conflicts_with_all = ["family", "parameter", "tau"])]
    pub data: Option<PathBuf>,
}

fn parse_calibration(s: &str) -> Result<GaussianCalibration, String> {
    match s {
        "pearson" => Ok(GaussianCalibration::Pearson),
        "kendall" => Ok(GaussianCalibration::Kendall),
        other => Err(format!("unknown calibration '{other}' (pearson or kendall)")),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        roc_copula::exec::set_thread_count(t);
    }
    let out = output::Output::new(&cli.out_dir, cli.quiet);
    match &cli.command {
        Command::Curve(a) => commands::curve(a, &cli.format, &out),
        Command::TheoremCheck(a) => commands::theorem_check(a, &cli.format, &out),
        Command::Analyze(a) => commands::analyze(a, &cli.format, cli.seed, &out),
        Command::Simulate(a) => commands::simulate(a, &cli.format, cli.seed.unwrap_or(0), &out),
        Command::Dependence(a) => commands::dependence(a, &cli.format, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("roc-copula: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
