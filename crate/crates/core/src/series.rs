//! Price ingestion, log returns, weekday resolution and the shuffle test.

use std::fmt;

use chrono::{Datelike, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze_series, AnalysisSettings};
use crate::error::{MfdfaError, Result};
use crate::spectrum::ComplexityParams;

#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub market_code: String,
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<f64>,
}

impl PriceSeries {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PriceColumn {
    #[default]
    Close,
    AdjClose,
}

impl PriceColumn {
    fn header(self) -> &'static str {
        match self {
            PriceColumn::Close => "Close",
            PriceColumn::AdjClose => "Adj Close",
        }
    }
}

/// Parsed prices plus the number of provider "null" rows dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPrices {
    pub series: PriceSeries,
    pub dropped_rows: usize,
}

fn is_missing(field: &str) -> bool {
    field.is_empty() || field.eq_ignore_ascii_case("null")
}

/// Parse a comma-separated price table with `Date` and `Close` (or
/// `Adj Close`) columns. Dates are `YYYY-MM-DD`.
pub fn parse_prices(input: &str, column: PriceColumn, market_code: &str) -> Result<ParsedPrices> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| MfdfaError::MalformedHeader(e.to_string()))?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let date_col = find("Date").ok_or_else(|| MfdfaError::MalformedHeader("no Date column".into()))?;
    let close_col = find(column.header())
        .ok_or_else(|| MfdfaError::MalformedHeader(format!("no {} column", column.header())))?;

    let mut rows: Vec<(NaiveDate, f64)> = Vec::new();
    let mut dropped_rows = 0;
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| MfdfaError::Csv(e.to_string()))?;
        let date_field = record.get(date_col).unwrap_or("");
        if date_field.is_empty() && record.iter().all(str::is_empty) {
            continue;
        }
        let date = NaiveDate::parse_from_str(date_field, "%Y-%m-%d").map_err(|_| {
            MfdfaError::UnparsableDate { line, value: date_field.to_string() }
        })?;
        let close_field = record.get(close_col).unwrap_or("");
        if is_missing(close_field) {
            dropped_rows += 1;
            continue;
        }
        let close: f64 = close_field
            .parse()
            .ok()
            .filter(|c: &f64| c.is_finite())
            .ok_or_else(|| MfdfaError::UnparsableClose { line, value: close_field.to_string() })?;
        if close <= 0.0 {
            return Err(MfdfaError::NonPositiveClose { line, value: close });
        }
        rows.push((date, close));
    }
    rows.sort_by_key(|r| r.0);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(MfdfaError::DuplicateDate(w[0].0.to_string()));
    }
    let (dates, closes) = rows.into_iter().unzip();
    Ok(ParsedPrices {
        series: PriceSeries { market_code: market_code.to_string(), dates, closes },
        dropped_rows,
    })
}

/// Log returns, each dated by the later of its two closes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReturnSeries {
    pub dates: Vec<NaiveDate>,
    pub returns: Vec<f64>,
}

impl ReturnSeries {
    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> ReturnSeries {
        ReturnSeries {
            dates: self.dates[range.clone()].to_vec(),
            returns: self.returns[range].to_vec(),
        }
    }
}

pub fn log_returns(prices: &PriceSeries) -> Result<ReturnSeries> {
    if prices.len() < 2 {
        return Err(MfdfaError::SeriesTooShort { required: 2, actual: prices.len() });
    }
    let returns = prices.closes.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    Ok(ReturnSeries { dates: prices.dates[1..].to_vec(), returns })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DayLabel {
    Monday,
    Tuesday,
    Wednesday,
    Thursday,
    Friday,
    All,
}

impl DayLabel {
    pub const WEEKDAYS: [DayLabel; 5] = [
        DayLabel::Monday,
        DayLabel::Tuesday,
        DayLabel::Wednesday,
        DayLabel::Thursday,
        DayLabel::Friday,
    ];

    pub fn from_weekday(day: Weekday) -> Option<Self> {
        match day {
            Weekday::Mon => Some(DayLabel::Monday),
            Weekday::Tue => Some(DayLabel::Tuesday),
            Weekday::Wed => Some(DayLabel::Wednesday),
            Weekday::Thu => Some(DayLabel::Thursday),
            Weekday::Fri => Some(DayLabel::Friday),
            Weekday::Sat | Weekday::Sun => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DayLabel::Monday => "Monday",
            DayLabel::Tuesday => "Tuesday",
            DayLabel::Wednesday => "Wednesday",
            DayLabel::Thursday => "Thursday",
            DayLabel::Friday => "Friday",
            DayLabel::All => "All",
        }
    }
}

impl fmt::Display for DayLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The full return series and its five weekday sub-series.
#[derive(Debug, Clone, PartialEq)]
pub struct DayResolvedReturns {
    pub all: ReturnSeries,
    /// Monday through Friday, in that order.
    pub weekdays: [ReturnSeries; 5],
    /// Returns dated on a Saturday or Sunday, left out of every weekday series.
    pub weekend_excluded: usize,
}

impl DayResolvedReturns {
    pub fn get(&self, day: DayLabel) -> &ReturnSeries {
        match day {
            DayLabel::All => &self.all,
            d => &self.weekdays[d as usize],
        }
    }
}

/// Partition by calendar weekday of each return's date.
pub fn day_resolve(returns: &ReturnSeries) -> DayResolvedReturns {
    let mut weekdays: [ReturnSeries; 5] = Default::default();
    let mut weekend_excluded = 0;
    for (date, r) in returns.dates.iter().zip(&returns.returns) {
        match DayLabel::from_weekday(date.weekday()) {
            Some(day) => {
                let s = &mut weekdays[day as usize];
                s.dates.push(*date);
                s.returns.push(*r);
            }
            None => weekend_excluded += 1,
        }
    }
    if weekend_excluded > 0 {
        log::warn!("{weekend_excluded} weekend-dated returns excluded from weekday series");
    }
    DayResolvedReturns { all: returns.clone(), weekdays, weekend_excluded }
}

/// Literal every-fifth-return construction. Class `k` holds returns
/// `k, k+5, k+10, ...` counted from the first Monday-dated return, and is
/// labelled with weekday `k`; holidays make labels drift off the calendar.
pub fn day_resolve_stride5(returns: &ReturnSeries) -> DayResolvedReturns {
    let origin = returns
        .dates
        .iter()
        .position(|d| d.weekday() == Weekday::Mon)
        .unwrap_or(0);
    let mut weekdays: [ReturnSeries; 5] = Default::default();
    for (i, (date, r)) in returns.dates.iter().zip(&returns.returns).enumerate() {
        let class = (i + 5 - origin % 5) % 5;
        weekdays[class].dates.push(*date);
        weekdays[class].returns.push(*r);
    }
    DayResolvedReturns { all: returns.clone(), weekdays, weekend_excluded: 0 }
}

/// Permutation by `transpositions` uniformly random index-pair swaps driven
/// by ChaCha8 seeded from `seed`.
pub fn shuffle(series: &[f64], transpositions: u64, seed: u64) -> Vec<f64> {
    let mut out = series.to_vec();
    let n = out.len();
    if n < 2 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..transpositions {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        out.swap(i, j);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShuffleSettings {
    pub repetitions: usize,
    /// Swaps per repetition are `transposition_factor * N`.
    pub transposition_factor: u64,
    /// Repetition `k` uses seed `seed + k`.
    pub seed: u64,
}

impl Default for ShuffleSettings {
    fn default() -> Self {
        Self { repetitions: 100, transposition_factor: 1000, seed: 42 }
    }
}

/// Mean or standard deviation of each parameter over repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ParamStats {
    pub alpha0: f64,
    pub width: f64,
    pub skew: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShuffleReport {
    pub day: DayLabel,
    pub n_repetitions: usize,
    pub transpositions_per_rep: u64,
    pub original: ComplexityParams,
    pub mean_params: ParamStats,
    pub std_params: ParamStats,
    /// `|original alpha0 - mean shuffled alpha0|`
    pub delta_alpha0: f64,
    /// `|original W - mean shuffled W|`
    pub delta_width: f64,
    pub failures: usize,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Compare one series against `repetitions` shuffled copies of itself.
pub fn shuffle_test_series(
    day: DayLabel,
    series: &[f64],
    analysis: &AnalysisSettings,
    settings: &ShuffleSettings,
) -> Result<ShuffleReport> {
    if settings.repetitions == 0 {
        return Err(MfdfaError::InvalidSpec("repetitions must be positive".into()));
    }
    let original = analyze_series(series, analysis)?.params;
    let transpositions = settings.transposition_factor * series.len() as u64;
    let outcomes = analysis.execution.map_range(settings.repetitions, |k| {
        let shuffled = shuffle(series, transpositions, settings.seed.wrapping_add(k as u64));
        analyze_series(&shuffled, analysis).map(|a| a.params)
    });
    let ok: Vec<ComplexityParams> = outcomes.iter().filter_map(|o| o.as_ref().ok().copied()).collect();
    let failures = outcomes.len() - ok.len();
    if ok.is_empty() {
        return Err(outcomes.into_iter().find_map(|o| o.err()).expect("at least one failure"));
    }
    let pick = |f: fn(&ComplexityParams) -> f64| mean_std(&ok.iter().map(f).collect::<Vec<_>>());
    let (a_mean, a_std) = pick(|p| p.alpha0);
    let (w_mean, w_std) = pick(|p| p.width);
    let (r_mean, r_std) = pick(|p| p.skew);
    Ok(ShuffleReport {
        day,
        n_repetitions: settings.repetitions,
        transpositions_per_rep: transpositions,
        original,
        mean_params: ParamStats { alpha0: a_mean, width: w_mean, skew: r_mean },
        std_params: ParamStats { alpha0: a_std, width: w_std, skew: r_std },
        delta_alpha0: (original.alpha0 - a_mean).abs(),
        delta_width: (original.width - w_mean).abs(),
        failures,
    })
}

/// Shuffle test for each weekday series, Monday through Friday.
pub fn shuffle_test(
    day_returns: &DayResolvedReturns,
    analysis: &AnalysisSettings,
    settings: &ShuffleSettings,
) -> Vec<(DayLabel, Result<ShuffleReport>)> {
    DayLabel::WEEKDAYS
        .iter()
        .map(|&day| {
            let series = &day_returns.get(day).returns;
            (day, shuffle_test_series(day, series, analysis, settings))
        })
        .collect()
}
