//! Multifractal detrended fluctuation analysis (MF-DFA) of daily return
//! series resolved by day of the week.
//!
//! The pipeline runs profile integration and segment detrending
//! ([`fluctuation`]), the Legendre transform and quartic spectrum model
//! ([`spectrum`]), and summarizes each series by the spectrum position
//! `alpha0`, width `W` and skew `r`. [`series`] handles price ingestion,
//! weekday partitioning and the shuffle test, [`windows`] the sliding-window
//! evolution, and [`synth`] the reference generators.
//!
//! Inner loops over scales, shuffle repetitions and windows run on rayon
//! when the `parallel` feature is enabled (default); see [`Execution`].

// NaN must fail range checks, so several guards are written as `!(x > y)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod fluctuation;
pub mod numeric;
pub mod parallel;
pub mod series;
pub mod spectrum;
pub mod synth;
pub mod windows;

pub use analysis::{analyze_series, hurst_of_series, AnalysisSettings, SeriesAnalysis};
pub use error::{MfdfaError, Result};
pub use fluctuation::{
    detrended_variance, fluctuation_function, hurst_exponents, integrate_profile,
    FluctuationOptions, FluctuationSurface, HurstFunction, Profile, QGrid, ScaleGrid,
};
pub use parallel::Execution;
pub use series::{
    day_resolve, day_resolve_stride5, log_returns, parse_prices, shuffle, shuffle_test,
    shuffle_test_series, DayLabel, DayResolvedReturns, ParamStats, ParsedPrices, PriceColumn,
    PriceSeries, ReturnSeries, ShuffleReport, ShuffleSettings,
};
pub use spectrum::{
    complexity_params, fit_quartic, legendre_transform, renyi_exponents, spectrum_params,
    ComplexityParams, QuarticFit, RenyiFunction, SingularitySpectrum,
};
pub use synth::{gen_binomial_cascade, gen_gaussian_noise, CascadeSpec, NoiseSpec};
pub use windows::{
    difference_trace, evolve_spectra, plan_windows, DifferenceTrace, SpectrumTrace, WindowPlan,
};
