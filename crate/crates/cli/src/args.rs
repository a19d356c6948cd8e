use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use segc_core::format::NumberStyle;
use segc_core::Measure;

#[derive(Debug, Parser)]
#[command(name = "segc", version, about = "Image complexity measures and downsampling guidance for segmentation")]
pub struct Cli {
    /// Worker threads; 0 or unset uses all cores.
    #[arg(long, global = true, env = "SEGC_JOBS")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute DE, MNF, MDF and PC for every item of a dataset manifest.
    Complexity(ComplexityArgs),
    /// Degrade every mask by downsampling and score it against the original.
    Degrade(DegradeArgs),
    /// Fit polynomial regressions of segmentation error on complexity.
    Fit(FitArgs),
    /// Recommend a downsampling factor and network depth.
    Advise(AdviseArgs),
    /// Run the reference suite and compare against the shipped expected grid.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Response {
    /// Jaccard error E = 1 - J.
    E,
    /// Dice coefficient D.
    D,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Overwrite an existing output file.
    #[arg(long)]
    pub force: bool,
    /// Fixed four-decimal numbers instead of shortest round-trip.
    #[arg(long)]
    pub paper_format: bool,
}

impl OutputArgs {
    pub fn style(&self) -> NumberStyle {
        if self.paper_format {
            NumberStyle::Fixed4
        } else {
            NumberStyle::RoundTrip
        }
    }
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    /// Dataset manifest (JSON).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Radial frequency bins of the power spectrum.
    #[arg(long, default_value_t = segc_core::spectra::DEFAULT_BINS, value_parser = clap::value_parser!(usize))]
    pub bins: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DegradeArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Downsampling factors, each at least 2.
    #[arg(long, value_delimiter = ',', default_values_t = segc_core::degrade::DEFAULT_FACTORS)]
    pub factors: Vec<u32>,
    /// Candidate thresholds j/L, j = 1..=L, for the optimal binarization.
    #[arg(long, default_value_t = segc_core::degrade::DEFAULT_THRESHOLD_LEVELS)]
    pub levels: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Use the shipped reference datasets instead of measured inputs.
    #[arg(long, conflicts_with_all = ["degrade", "complexity"])]
    pub paper_fixture: bool,
    /// Output of `segc degrade`; repeat for several datasets.
    #[arg(long, requires = "complexity")]
    pub degrade: Vec<PathBuf>,
    /// JSON output of `segc complexity`; one per dataset.
    #[arg(long, requires = "degrade")]
    pub complexity: Vec<PathBuf>,
    /// Metric regressed on complexity.
    #[arg(long, value_enum, default_value_t = Response::E)]
    pub response: Response,
    /// Highest polynomial degree fitted.
    #[arg(long, default_value_t = 6)]
    pub max_degree: usize,
    /// Append the minimum-AICc row per measure and factor.
    #[arg(long)]
    pub select: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AdviseArgs {
    /// Use fits of the shipped reference datasets.
    #[arg(long, conflicts_with = "fits")]
    pub paper_fixture: bool,
    /// JSON output of `segc fit --format json`.
    #[arg(long)]
    pub fits: Option<PathBuf>,
    /// Degree of the fits to use.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    /// JSON output of `segc complexity`; its aggregate supplies the value.
    #[arg(long, conflicts_with = "value")]
    pub complexity: Option<PathBuf>,
    /// Complexity value of the dataset.
    #[arg(long)]
    pub value: Option<f64>,
    #[arg(long, default_value = "MDF", value_parser = parse_measure)]
    pub measure: Measure,
    /// Budget on predicted E.
    #[arg(long, default_value_t = segc_core::advisor::DEFAULT_BUDGET)]
    pub eps: f64,
    /// Complexity at or below which a deep network is recommended.
    #[arg(long, default_value_t = segc_core::advisor::DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Directory receiving the generated tables.
    #[arg(long, default_value = "segc-reproduce")]
    pub output_dir: PathBuf,
    /// Overwrite files already in the output directory.
    #[arg(long)]
    pub force: bool,
    /// Seed of the synthetic dataset run alongside the reference data.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = segc_core::spectra::DEFAULT_BINS)]
    pub bins: usize,
    #[arg(long, default_value_t = segc_core::degrade::DEFAULT_THRESHOLD_LEVELS)]
    pub levels: u32,
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse().map_err(|e: segc_core::Error| e.to_string())
}
