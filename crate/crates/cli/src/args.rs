use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mfdfa::{AnalysisSettings, DayLabel, Execution, PriceColumn, ShuffleSettings};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "mfdfa", version, about = "Day-of-week resolved multifractal detrended fluctuation analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complexity parameters (alpha0, W, r) per weekday and for the full series.
    Analyze(RunArgs),
    /// Original versus shuffled parameters per weekday.
    ShuffleTest(RunArgs),
    /// Sliding-window parameter traces and differences against a baseline day.
    Evolve(RunArgs),
    /// Write a synthetic series as a Date,Close price file.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnArg {
    Close,
    AdjClose,
}

impl From<ColumnArg> for PriceColumn {
    fn from(c: ColumnArg) -> Self {
        match c {
            ColumnArg::Close => PriceColumn::Close,
            ColumnArg::AdjClose => PriceColumn::AdjClose,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DayArg {
    Monday,
    Tuesday,
    Wednesday,
    Thursday,
    Friday,
    All,
}

impl From<DayArg> for DayLabel {
    fn from(d: DayArg) -> Self {
        match d {
            DayArg::Monday => DayLabel::Monday,
            DayArg::Tuesday => DayLabel::Tuesday,
            DayArg::Wednesday => DayLabel::Wednesday,
            DayArg::Thursday => DayLabel::Thursday,
            DayArg::Friday => DayLabel::Friday,
            DayArg::All => DayLabel::All,
        }
    }
}

/// Every analysis knob. Serialized verbatim into report headers.
#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalysisConfig {
    /// Order of the local detrending polynomial.
    #[arg(long, default_value_t = 2)]
    pub detrend_order: usize,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    pub q_min: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub q_max: f64,
    #[arg(long, default_value_t = 0.25)]
    pub q_step: f64,
    /// Smallest segment length.
    #[arg(long, default_value_t = 10)]
    pub n_min: usize,
    /// Largest segment length is N / this value (at least 4).
    #[arg(long, default_value_t = 4)]
    pub n_max_divisor: usize,
    /// Number of log-spaced scales before deduplication.
    #[arg(long, default_value_t = 30)]
    pub scale_count: usize,
    /// Lower end of the scaling regression range (defaults to the smallest scale).
    #[arg(long)]
    pub fit_min: Option<usize>,
    /// Upper end of the scaling regression range (defaults to the largest scale).
    #[arg(long)]
    pub fit_max: Option<usize>,
    /// Segment from the series start only, discarding the tail.
    #[arg(long)]
    pub single_pass: bool,
    /// Fail on zero-variance segments instead of flooring them.
    #[arg(long)]
    pub strict_zero_variance: bool,
    /// Build weekday series by taking every fifth return instead of by calendar weekday.
    #[arg(long)]
    pub stride5: bool,
    #[arg(long, env = "MFDFA_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub repetitions: usize,
    /// Swaps per shuffle are this factor times the series length.
    #[arg(long, default_value_t = 1000)]
    pub transposition_factor: u64,
    /// Sliding window length, in observations of the day-resolved series.
    #[arg(long, default_value_t = 730)]
    pub window: usize,
    /// Sliding step, in observations of the day-resolved series.
    #[arg(long, default_value_t = 5)]
    pub step: usize,
    #[arg(long, value_enum, default_value_t = ColumnArg::Close)]
    pub column: ColumnArg,
    /// Run every loop on one thread.
    #[arg(long)]
    pub sequential: bool,
}

impl AnalysisConfig {
    pub fn analysis_settings(&self) -> AnalysisSettings {
        let fit_range = match (self.fit_min, self.fit_max) {
            (None, None) => None,
            (lo, hi) => Some((lo.unwrap_or(0), hi.unwrap_or(usize::MAX))),
        };
        AnalysisSettings {
            detrend_order: self.detrend_order,
            q_min: self.q_min,
            q_max: self.q_max,
            q_step: self.q_step,
            n_min: self.n_min,
            n_max_divisor: self.n_max_divisor,
            scale_count: self.scale_count,
            dual_pass: !self.single_pass,
            fit_range,
            strict_zero_variance: self.strict_zero_variance,
            execution: if self.sequential { Execution::Sequential } else { Execution::default() },
        }
    }

    pub fn shuffle_settings(&self) -> ShuffleSettings {
        ShuffleSettings {
            repetitions: self.repetitions,
            transposition_factor: self.transposition_factor,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Price file (Date plus Close or Adj Close columns); `-` reads stdin.
    pub input: PathBuf,
    #[command(flatten)]
    pub config: AnalysisConfig,
    /// Which series to report, comma-separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub days: Vec<DayArg>,
    /// Baseline day for difference traces (evolve only).
    #[arg(long, value_enum, default_value_t = DayArg::Monday)]
    pub baseline: DayArg,
    /// Also emit the (alpha, f(alpha)) points of every spectrum.
    #[arg(long)]
    pub spectra: bool,
    /// Market code for the report header; defaults to the input file stem.
    #[arg(long)]
    pub market: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(group = clap::ArgGroup::new("generator").required(true).args(["cascade", "noise"]))]
pub struct SynthArgs {
    /// Binomial cascade, e.g. `a=0.6,k=13` (optionally `seed=1`).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub cascade: Option<Vec<String>>,
    /// Gaussian noise, e.g. `H=0.7,N=8192` (optionally `seed=1`).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub noise: Option<Vec<String>>,
    #[arg(long, env = "MFDFA_SEED", default_value_t = 42)]
    pub seed: u64,
    /// First return date; must be a weekday.
    #[arg(long, default_value = "2001-01-01")]
    pub start: String,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
