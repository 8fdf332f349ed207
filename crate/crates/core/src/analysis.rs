//! One-shot pipeline from a return series to its complexity parameters.

use serde::{Deserialize, Serialize};

use crate::error::{MfdfaError, Result};
use crate::fluctuation::{
    fluctuation_function, hurst_exponents, integrate_profile, FluctuationOptions,
    FluctuationSurface, HurstFunction, QGrid, ScaleGrid,
};
use crate::parallel::Execution;
use crate::spectrum::{
    legendre_transform, renyi_exponents, spectrum_params, ComplexityParams, QuarticFit,
    RenyiFunction, SingularitySpectrum,
};

/// Numerical settings shared by every stage of the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSettings {
    pub detrend_order: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub q_step: f64,
    pub n_min: usize,
    /// Largest scale is `N / n_max_divisor`; must be at least 4.
    pub n_max_divisor: usize,
    pub scale_count: usize,
    pub dual_pass: bool,
    /// Inclusive `(n_lo, n_hi)` for the scaling regression; whole grid when unset.
    pub fit_range: Option<(usize, usize)>,
    pub strict_zero_variance: bool,
    pub execution: Execution,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            detrend_order: 2,
            q_min: -5.0,
            q_max: 5.0,
            q_step: 0.25,
            n_min: 10,
            n_max_divisor: 4,
            scale_count: 30,
            dual_pass: true,
            fit_range: None,
            strict_zero_variance: false,
            execution: Execution::default(),
        }
    }
}

impl AnalysisSettings {
    pub fn q_grid(&self) -> Result<QGrid> {
        QGrid::range(self.q_min, self.q_max, self.q_step)
    }

    /// Shortest series the default scale grid accepts.
    pub fn min_series_len(&self) -> usize {
        self.n_max_divisor.max(4) * self.n_min
    }

    pub fn scale_grid(&self, series_len: usize) -> Result<ScaleGrid> {
        if self.n_max_divisor < 4 {
            return Err(MfdfaError::InvalidScaleGrid(format!(
                "n_max divisor {} below 4",
                self.n_max_divisor
            )));
        }
        let required = self.min_series_len();
        if series_len < required {
            return Err(MfdfaError::SeriesTooShort { required, actual: series_len });
        }
        ScaleGrid::log_spaced(
            self.n_min,
            series_len / self.n_max_divisor,
            self.scale_count,
            series_len,
            self.detrend_order,
        )
    }

    pub fn fluctuation_options(&self) -> FluctuationOptions {
        FluctuationOptions {
            detrend_order: self.detrend_order,
            dual_pass: self.dual_pass,
            strict_zero_variance: self.strict_zero_variance,
            execution: self.execution,
        }
    }
}

/// Every intermediate of one pipeline run.
#[derive(Debug, Clone)]
pub struct SeriesAnalysis {
    pub surface: FluctuationSurface,
    pub hurst: HurstFunction,
    pub renyi: RenyiFunction,
    pub spectrum: SingularitySpectrum,
    pub fit: Option<QuarticFit>,
    pub params: ComplexityParams,
}

/// Profile, fluctuation surface and generalized Hurst exponents only.
pub fn hurst_of_series(x: &[f64], settings: &AnalysisSettings) -> Result<(FluctuationSurface, HurstFunction)> {
    let q_grid = settings.q_grid()?;
    let scale_grid = settings.scale_grid(x.len())?;
    let profile = integrate_profile(x)?;
    let surface = fluctuation_function(&profile, &scale_grid, &q_grid, &settings.fluctuation_options())?;
    let hurst = hurst_exponents(&surface, settings.fit_range)?;
    Ok((surface, hurst))
}

pub fn analyze_series(x: &[f64], settings: &AnalysisSettings) -> Result<SeriesAnalysis> {
    let (surface, hurst) = hurst_of_series(x, settings)?;
    let renyi = renyi_exponents(&hurst);
    let spectrum = legendre_transform(&renyi)?;
    let (fit, params) = spectrum_params(&spectrum)?;
    Ok(SeriesAnalysis { surface, hurst, renyi, spectrum, fit, params })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_series_rejected() {
        let s = AnalysisSettings::default();
        assert_eq!(s.min_series_len(), 40);
        assert!(matches!(
            analyze_series(&[0.1; 39], &s),
            Err(MfdfaError::SeriesTooShort { required: 40, actual: 39 })
        ));
    }

    #[test]
    fn divisor_below_four_rejected() {
        let s = AnalysisSettings { n_max_divisor: 2, ..Default::default() };
        assert!(matches!(s.scale_grid(1000), Err(MfdfaError::InvalidScaleGrid(_))));
    }
}
