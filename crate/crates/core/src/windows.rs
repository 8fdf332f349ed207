//! Sliding-window evolution of the complexity parameters.

use std::ops::Range;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze_series, AnalysisSettings};
use crate::error::{MfdfaError, Result};
use crate::series::{DayLabel, ReturnSeries};
use crate::spectrum::{ComplexityParams, SingularitySpectrum};

/// Windows `[t*step, t*step + window)` for `t = 0..count`, zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowPlan {
    pub series_len: usize,
    pub window: usize,
    pub step: usize,
    pub count: usize,
}

impl WindowPlan {
    pub fn range(&self, t: usize) -> Range<usize> {
        let start = t * self.step;
        start..start + self.window
    }

    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.count).map(|t| self.range(t))
    }
}

pub fn plan_windows(series_len: usize, window: usize, step: usize) -> Result<WindowPlan> {
    if window > series_len {
        return Err(MfdfaError::WindowLargerThanSeries { window, len: series_len });
    }
    if step == 0 || step > window {
        return Err(MfdfaError::InvalidWindowPlan(format!(
            "step {step} must lie in 1..={window}"
        )));
    }
    Ok(WindowPlan {
        series_len,
        window,
        step,
        count: (series_len - window) / step + 1,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTrace {
    pub plan: WindowPlan,
    /// Date of the last return in each window.
    pub window_times: Vec<NaiveDate>,
    /// `None` marks a window whose pipeline failed; see `errors`.
    pub params: Vec<Option<ComplexityParams>>,
    pub errors: Vec<Option<MfdfaError>>,
    pub spectra: Option<Vec<Option<SingularitySpectrum>>>,
}

impl SpectrumTrace {
    pub fn failures(&self) -> usize {
        self.errors.iter().filter(|e| e.is_some()).count()
    }
}

/// Run the full pipeline independently on every window of `day_series`.
pub fn evolve_spectra(
    day_series: &ReturnSeries,
    plan: &WindowPlan,
    settings: &AnalysisSettings,
    keep_spectra: bool,
) -> Result<SpectrumTrace> {
    if plan.series_len != day_series.len() {
        return Err(MfdfaError::InvalidWindowPlan(format!(
            "plan is for {} points, series has {}",
            plan.series_len,
            day_series.len()
        )));
    }
    let required = settings.min_series_len();
    if plan.window < required {
        return Err(MfdfaError::SeriesTooShort { required, actual: plan.window });
    }
    let outcomes = settings.execution.map_range(plan.count, |t| {
        analyze_series(&day_series.returns[plan.range(t)], settings)
    });

    let mut trace = SpectrumTrace {
        plan: *plan,
        window_times: plan.ranges().map(|r| day_series.dates[r.end - 1]).collect(),
        params: Vec::with_capacity(plan.count),
        errors: Vec::with_capacity(plan.count),
        spectra: keep_spectra.then(|| Vec::with_capacity(plan.count)),
    };
    for outcome in outcomes {
        match outcome {
            Ok(a) => {
                trace.params.push(Some(a.params));
                trace.errors.push(None);
                if let Some(s) = trace.spectra.as_mut() {
                    s.push(Some(a.spectrum));
                }
            }
            Err(e) => {
                trace.params.push(None);
                trace.errors.push(Some(e));
                if let Some(s) = trace.spectra.as_mut() {
                    s.push(None);
                }
            }
        }
    }
    if trace.params.iter().all(Option::is_none) {
        let first = trace.errors.iter().flatten().next().cloned().expect("non-empty plan");
        return Err(MfdfaError::AllWindowsFailed(Box::new(first)));
    }
    Ok(trace)
}

/// Baseline-minus-other parameter differences, aligned by window index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceTrace {
    pub baseline_day: DayLabel,
    pub other_day: DayLabel,
    pub window_index: Vec<usize>,
    /// Baseline window end dates.
    pub window_times: Vec<NaiveDate>,
    pub delta_alpha0: Vec<f64>,
    pub delta_width: Vec<f64>,
}

/// Positive `delta_alpha0` means the baseline is more persistent. Traces of
/// different length are truncated to the shorter; windows missing on either
/// side are skipped.
pub fn difference_trace(
    baseline_day: DayLabel,
    baseline: &SpectrumTrace,
    other_day: DayLabel,
    other: &SpectrumTrace,
) -> Result<DifferenceTrace> {
    let mut diff = DifferenceTrace {
        baseline_day,
        other_day,
        window_index: Vec::new(),
        window_times: Vec::new(),
        delta_alpha0: Vec::new(),
        delta_width: Vec::new(),
    };
    let common = baseline.params.len().min(other.params.len());
    for t in 0..common {
        if let (Some(b), Some(o)) = (&baseline.params[t], &other.params[t]) {
            diff.window_index.push(t);
            diff.window_times.push(baseline.window_times[t]);
            diff.delta_alpha0.push(b.alpha0 - o.alpha0);
            diff.delta_width.push(b.width - o.width);
        }
    }
    if diff.window_index.is_empty() {
        return Err(MfdfaError::NoCommonWindows);
    }
    Ok(diff)
}
