//! Command line front end for training and inspecting additive models built
//! from per-feature boosted stumps.
//!
//! Four subcommands: `synth` writes benchmark datasets, `train` fits a model
//! on a CSV file, `explain-local` fits a surrogate to a black box around one
//! point, and `shapes` exports contribution curves for plotting. Every run
//! leaves a manifest next to its primary output recording the resolved
//! configuration, the seed, and content digests of inputs and outputs. File
//! writes go through a temp-file-plus-rename step, so a failed run leaves
//! nothing half-written.

mod commands;
mod manifest;
mod reports;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use egbm::synthetic::ChessboardLabels;
use egbm::train::{LassoMode, Task, TrainConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let threads = cli.threads;
    if let Some(count) = threads {
        if count == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(count)
            .build_global()
            .map_err(|err| CliError::Runtime(format!("thread pool setup failed: {err}")))?;
    }
    match cli.command {
        Command::Synth(args) => commands::synth::run(&args, threads),
        Command::Train(args) => commands::train::run(&args, threads),
        Command::ExplainLocal(args) => commands::local::run(&args, threads),
        Command::Shapes(args) => commands::shapes::run(&args, threads),
    }
}

/// Errors split by exit code: bad flag values exit 2, failures while running
/// (files, training, subprocesses) exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<egbm::Error> for CliError {
    fn from(err: egbm::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

pub fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

#[derive(Parser)]
#[command(
    name = "egbm",
    version,
    about = "Additive models assembled from per-feature boosted stumps"
)]
pub struct Cli {
    /// Cap the training thread pool (default: all available cores)
    #[arg(long, global = true, value_name = "COUNT")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a synthetic benchmark dataset as CSV
    Synth(SynthArgs),
    /// Train on a CSV dataset; write the model and a training report
    Train(TrainArgs),
    /// Fit a local surrogate to a black box around one point
    ExplainLocal(LocalArgs),
    /// Export per-feature contribution curves as plot-ready CSV
    Shapes(ShapesArgs),
}

#[derive(Args)]
pub struct SynthArgs {
    /// Generator family
    #[arg(long, value_enum)]
    pub kind: SynthKind,

    /// Number of rows
    #[arg(long, default_value_t = 1000)]
    pub n: usize,

    /// Gaussian noise spread on the target; linear, nonlinear, and
    /// polynomial only (default 0.05)
    #[arg(long)]
    pub noise: Option<f64>,

    /// Board resolution per axis; chessboard only (default 4)
    #[arg(long)]
    pub cells: Option<usize>,

    /// Label convention; chessboard only (default plus-minus)
    #[arg(long, value_enum)]
    pub labels: Option<LabelsArg>,

    /// Random seed; equal seeds give byte-identical output
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output CSV path; the target column is named y
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    Linear,
    Nonlinear,
    Polynomial,
    Chessboard,
}

impl SynthKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SynthKind::Linear => "linear",
            SynthKind::Nonlinear => "nonlinear",
            SynthKind::Polynomial => "polynomial",
            SynthKind::Chessboard => "chessboard",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LabelsArg {
    /// Labels -1 and 1
    PlusMinus,
    /// Labels 0 and 1
    ZeroOne,
}

impl LabelsArg {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelsArg::PlusMinus => "plus-minus",
            LabelsArg::ZeroOne => "zero-one",
        }
    }
}

impl From<LabelsArg> for ChessboardLabels {
    fn from(labels: LabelsArg) -> ChessboardLabels {
        match labels {
            LabelsArg::PlusMinus => ChessboardLabels::PlusMinus,
            LabelsArg::ZeroOne => ChessboardLabels::ZeroOne,
        }
    }
}

#[derive(Args)]
pub struct TrainArgs {
    /// Input CSV path
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,

    /// Name of the target column
    #[arg(long, default_value = "y")]
    pub target: String,

    /// Standardize feature columns before training; the saved model then
    /// expects standardized inputs
    #[arg(
        long,
        value_name = "BOOL",
        num_args = 0..=1,
        default_value_t = false,
        default_missing_value = "true",
        action = clap::ArgAction::Set
    )]
    pub standardize_features: bool,

    #[command(flatten)]
    pub train: TrainFlags,

    /// Where to write the trained model (JSON)
    #[arg(long, value_name = "PATH")]
    pub model_out: PathBuf,

    /// Where to write the training report (JSON)
    #[arg(long, value_name = "PATH")]
    pub report_out: PathBuf,

    /// Report format
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("blackbox_source").required(true))]
pub struct LocalArgs {
    /// Point of interest, comma-separated feature values
    #[arg(long, value_name = "V1,V2,...")]
    pub point: F64List,

    /// Feature names, comma-separated (default: x1, x2, ...)
    #[arg(long, value_name = "N1,N2,...")]
    pub feature_names: Option<NameList>,

    /// Shell command queried once as the black box: CSV rows on stdin, one
    /// prediction per line on stdout
    #[arg(long, value_name = "CMD", group = "blackbox_source")]
    pub blackbox: Option<String>,

    /// Use the built-in smooth chessboard field as the black box
    #[arg(long, group = "blackbox_source")]
    pub chessboard: bool,

    /// Board resolution of the built-in chessboard (default 4)
    #[arg(long, requires = "chessboard")]
    pub cells: Option<usize>,

    /// Gaussian neighborhood spread shared by all features (default 0.1)
    #[arg(long, group = "perturb")]
    pub sigma: Option<f64>,

    /// Per-feature Gaussian spreads, comma-separated
    #[arg(long, value_name = "S1,S2,...", group = "perturb")]
    pub sigma_per_feature: Option<F64List>,

    /// Lower corner of a uniform sampling box, comma-separated
    #[arg(long, value_name = "L1,L2,...", group = "perturb", requires = "box_upper")]
    pub box_lower: Option<F64List>,

    /// Upper corner of a uniform sampling box, comma-separated
    #[arg(long, value_name = "U1,U2,...", requires = "box_lower")]
    pub box_upper: Option<F64List>,

    /// Neighborhood size including the point itself
    #[arg(long, default_value_t = 1000)]
    pub n: usize,

    /// Standardize neighborhood columns before fitting the surrogate
    #[arg(
        long,
        value_name = "BOOL",
        num_args = 0..=1,
        default_value_t = true,
        default_missing_value = "true",
        action = clap::ArgAction::Set
    )]
    pub standardize_features: bool,

    /// Grid resolution of the reported shape curves
    #[arg(long, default_value_t = 50)]
    pub shape_grid: usize,

    #[command(flatten)]
    pub train: TrainFlags,

    /// Where to write the explanation report (JSON)
    #[arg(long, value_name = "PATH")]
    pub report_out: PathBuf,

    /// Report format
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
}

#[derive(Args)]
pub struct ShapesArgs {
    /// Trained model JSON path
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,

    /// Dataset CSV that supplies the feature ranges and centering
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,

    /// Name of the target column in the dataset
    #[arg(long, default_value = "y")]
    pub target: String,

    /// Comma-separated feature names to export (default: all)
    #[arg(long, value_name = "N1,N2,...")]
    pub features: Option<NameList>,

    /// Number of grid points per curve
    #[arg(long, default_value_t = 50)]
    pub grid: usize,

    /// Rescale each curve to span [0, 1]
    #[arg(long)]
    pub scaled: bool,

    /// Directory for the per-feature CSV files
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
}

/// Training flags shared by `train` and `explain-local`.
#[derive(Args, Debug)]
pub struct TrainFlags {
    /// Outer training iterations
    #[arg(long, default_value_t = 100, value_name = "COUNT")]
    pub iterations: usize,

    /// Weight smoothing factor in (0, 1]; 1 disables smoothing
    #[arg(long, default_value_t = 0.3)]
    pub alpha: f64,

    /// Stump shrinkage in (0, 1]
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,

    /// Stumps appended per feature within one outer iteration
    #[arg(long, default_value_t = 1, value_name = "COUNT")]
    pub inner_steps: usize,

    /// Fix the L1 penalty instead of cross-validating it; 0 means plain
    /// least squares
    #[arg(long, value_name = "LAMBDA", conflicts_with_all = ["cv_folds", "grid_size"])]
    pub lasso_lambda: Option<f64>,

    /// Cross-validation folds for the penalty search
    #[arg(long, default_value_t = 5, value_name = "COUNT")]
    pub cv_folds: usize,

    /// Size of the log-spaced penalty grid
    #[arg(long, default_value_t = egbm::lasso::DEFAULT_GRID_SIZE, value_name = "COUNT")]
    pub grid_size: usize,

    /// Learning task
    #[arg(long, value_enum, default_value_t = TaskArg::Regression)]
    pub task: TaskArg,

    /// Warm-up stumps fitted per feature before classification training
    #[arg(long, default_value_t = 10, value_name = "COUNT")]
    pub pretrain_steps: usize,

    /// Random seed; equal seeds give byte-identical outputs
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl TrainFlags {
    pub fn to_config(&self) -> TrainConfig {
        let lasso = match self.lasso_lambda {
            Some(lambda) => LassoMode::Fixed { lambda },
            None => LassoMode::CrossValidated {
                folds: self.cv_folds,
                grid_size: self.grid_size,
            },
        };
        TrainConfig {
            iterations: self.iterations,
            alpha: self.alpha,
            learning_rate: self.learning_rate,
            inner_steps: self.inner_steps,
            lasso,
            task: self.task.into(),
            pretrain_steps: self.pretrain_steps,
            seed: self.seed,
            ..TrainConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Regression,
    Classification,
}

impl From<TaskArg> for Task {
    fn from(task: TaskArg) -> Task {
        match task {
            TaskArg::Regression => Task::Regression,
            TaskArg::Classification => Task::Classification,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    /// JSON report only
    Json,
    /// JSON report plus CSV matrices for loss, weights, and importance
    JsonCsv,
}

impl ReportFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::JsonCsv => "json-csv",
        }
    }

    pub fn wants_csv(self) -> bool {
        self == ReportFormat::JsonCsv
    }
}

/// Comma-separated numbers as a single flag value.
#[derive(Clone, Debug)]
pub struct F64List(pub Vec<f64>);

impl FromStr for F64List {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|item| {
                let item = item.trim();
                item.parse::<f64>()
                    .map_err(|_| format!("{item:?} is not a number"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(F64List)
    }
}

/// Comma-separated names as a single flag value.
#[derive(Clone, Debug)]
pub struct NameList(pub Vec<String>);

impl FromStr for NameList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let names: Vec<String> = s.split(',').map(|name| name.trim().to_string()).collect();
        if names.iter().any(String::is_empty) {
            return Err("empty name in list".to_string());
        }
        Ok(NameList(names))
    }
}
