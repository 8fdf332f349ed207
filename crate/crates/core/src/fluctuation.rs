//! Profile integration, segment detrending, q-order fluctuation functions and
//! generalized Hurst exponents.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{MfdfaError, Result};
use crate::numeric::{ols_line, PolyBasis};
use crate::parallel::Execution;

/// Segment variances below this value are floored before taking moments.
pub const VARIANCE_FLOOR: f64 = 1e-30;

/// Cumulative sum of mean-subtracted values.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    values: Vec<f64>,
}

impl Profile {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_length(&self) -> usize {
        self.values.len()
    }
}

pub fn integrate_profile(x: &[f64]) -> Result<Profile> {
    if x.len() < 4 {
        return Err(MfdfaError::SeriesTooShort { required: 4, actual: x.len() });
    }
    if let Some(index) = x.iter().position(|v| !v.is_finite()) {
        return Err(MfdfaError::NonFiniteInput { index });
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let mut acc = 0.0;
    let values = x
        .iter()
        .map(|v| {
            acc += v - mean;
            acc
        })
        .collect();
    Ok(Profile { values })
}

/// Strictly increasing segment lengths used for the scaling regression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleGrid {
    scales: Vec<usize>,
}

impl ScaleGrid {
    /// Validates `scales` against a series of `series_len` points detrended
    /// with polynomials of order `detrend_order`.
    pub fn new(scales: Vec<usize>, series_len: usize, detrend_order: usize) -> Result<Self> {
        if scales.is_empty() {
            return Err(MfdfaError::InvalidScaleGrid("empty".into()));
        }
        if scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MfdfaError::InvalidScaleGrid("scales must be strictly increasing".into()));
        }
        let (lo, hi) = (scales[0], scales[scales.len() - 1]);
        if lo < detrend_order + 2 {
            return Err(MfdfaError::InvalidScaleGrid(format!(
                "min scale {lo} < detrend order {detrend_order} + 2"
            )));
        }
        if hi > series_len / 4 {
            return Err(MfdfaError::InvalidScaleGrid(format!(
                "max scale {hi} exceeds N/4 = {}",
                series_len / 4
            )));
        }
        Ok(Self { scales })
    }

    /// About `count` scales logarithmically spaced in `[n_min, n_max]`,
    /// rounded and deduplicated.
    pub fn log_spaced(
        n_min: usize,
        n_max: usize,
        count: usize,
        series_len: usize,
        detrend_order: usize,
    ) -> Result<Self> {
        if n_max < n_min || n_min == 0 {
            return Err(MfdfaError::SeriesTooShort {
                required: 4 * n_min.max(1),
                actual: series_len,
            });
        }
        let count = count.max(2);
        let (lmin, lmax) = ((n_min as f64).ln(), (n_max as f64).ln());
        let mut scales: Vec<usize> = (0..count)
            .map(|i| (lmin + (lmax - lmin) * i as f64 / (count - 1) as f64).exp().round() as usize)
            .map(|n| n.clamp(n_min, n_max))
            .collect();
        scales.dedup();
        Self::new(scales, series_len, detrend_order)
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    pub fn min_scale(&self) -> usize {
        self.scales[0]
    }

    pub fn max_scale(&self) -> usize {
        self.scales[self.scales.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }
}

/// Strictly increasing moment orders. `q = 0` is allowed and handled by the
/// logarithmic-average limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QGrid {
    q_values: Vec<f64>,
}

impl QGrid {
    pub fn new(q_values: Vec<f64>) -> Result<Self> {
        if q_values.is_empty() {
            return Err(MfdfaError::InvalidQGrid("empty".into()));
        }
        if q_values.iter().any(|q| !q.is_finite()) {
            return Err(MfdfaError::InvalidQGrid("non-finite q".into()));
        }
        if q_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MfdfaError::InvalidQGrid("q values must be strictly increasing".into()));
        }
        Ok(Self { q_values })
    }

    /// `q_min, q_min + step, ..., q_max`; values within `1e-9 * step` of zero snap to zero.
    pub fn range(q_min: f64, q_max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(q_max >= q_min) {
            return Err(MfdfaError::InvalidQGrid(format!(
                "bad range [{q_min}, {q_max}] step {step}"
            )));
        }
        let count = ((q_max - q_min) / step + 1e-9).floor() as usize + 1;
        let q_values = (0..count)
            .map(|i| {
                let q = q_min + i as f64 * step;
                if q.abs() < 1e-9 * step {
                    0.0
                } else {
                    q
                }
            })
            .collect();
        Self::new(q_values)
    }

    pub fn values(&self) -> &[f64] {
        &self.q_values
    }

    pub fn len(&self) -> usize {
        self.q_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q_values.is_empty()
    }
}

impl Default for QGrid {
    fn default() -> Self {
        Self::range(-5.0, 5.0, 0.25).expect("default q grid")
    }
}

/// `F_q(n)` over both grids.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationSurface {
    pub scale_grid: ScaleGrid,
    pub q_grid: QGrid,
    /// Indexed `[q][n]`.
    pub values: Vec<Vec<f64>>,
    pub detrend_order: usize,
    /// Number of segment variances raised to [`VARIANCE_FLOOR`].
    pub floored_segments: usize,
}

impl FluctuationSurface {
    pub fn row(&self, q_index: usize) -> &[f64] {
        &self.values[q_index]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FluctuationOptions {
    pub detrend_order: usize,
    /// Also segment from the series end, using `2 N_n` segments.
    pub dual_pass: bool,
    /// Fail on a zero-variance segment instead of flooring it.
    pub strict_zero_variance: bool,
    pub execution: Execution,
}

impl Default for FluctuationOptions {
    fn default() -> Self {
        Self {
            detrend_order: 2,
            dual_pass: true,
            strict_zero_variance: false,
            execution: Execution::default(),
        }
    }
}

/// Detrended variance of segment `segment` (zero-based) of length `scale`.
pub fn detrended_variance(
    profile: &Profile,
    scale: usize,
    segment: usize,
    detrend_order: usize,
) -> Result<f64> {
    let len = profile.source_length();
    let end = (segment + 1).checked_mul(scale).filter(|&e| e <= len);
    let Some(end) = end else {
        return Err(MfdfaError::SegmentOutOfRange { scale, segment, len });
    };
    let basis = PolyBasis::new(scale, detrend_order)?;
    Ok(basis.residual_variance(&profile.values()[end - scale..end]))
}

/// Start offsets of the segments used at `scale`.
fn segment_offsets(len: usize, scale: usize, dual_pass: bool) -> Vec<usize> {
    let count = len / scale;
    let mut offsets: Vec<usize> = (0..count).map(|v| v * scale).collect();
    if dual_pass {
        offsets.extend((0..count).map(|v| len - (v + 1) * scale));
    }
    offsets
}

/// Power mean of segment variances of order `q`:
/// `(mean(F2^(q/2)))^(1/q)`, or `exp(mean(ln F2) / 2)` for `q = 0`.
/// Evaluated in log space with a max shift so large |q| cannot overflow.
fn power_mean(log_f2: &[f64], q: f64) -> f64 {
    let count = log_f2.len() as f64;
    if q == 0.0 {
        return (0.5 * log_f2.iter().sum::<f64>() / count).exp();
    }
    let half_q = 0.5 * q;
    let shift = log_f2
        .iter()
        .map(|l| half_q * l)
        .fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = log_f2.iter().map(|l| (half_q * l - shift).exp()).sum();
    ((shift + (sum / count).ln()) / q).exp()
}

pub fn fluctuation_function(
    profile: &Profile,
    scale_grid: &ScaleGrid,
    q_grid: &QGrid,
    options: &FluctuationOptions,
) -> Result<FluctuationSurface> {
    let len = profile.source_length();
    if scale_grid.max_scale() > len / 4 {
        return Err(MfdfaError::InvalidScaleGrid(format!(
            "max scale {} exceeds N/4 = {}",
            scale_grid.max_scale(),
            len / 4
        )));
    }
    let order = options.detrend_order;
    let qs = q_grid.values();
    let has_nonpositive_q = qs.iter().any(|&q| q <= 0.0);

    // per scale: (F_q(n) for every q, floored count)
    let columns = options.execution.map(scale_grid.scales(), |&scale| -> Result<(Vec<f64>, usize)> {
        let basis = PolyBasis::new(scale, order)?;
        let mut floored = 0;
        let mut log_f2 = Vec::new();
        for offset in segment_offsets(len, scale, options.dual_pass) {
            let f2 = basis.residual_variance(&profile.values()[offset..offset + scale]);
            let f2 = if f2 < VARIANCE_FLOOR {
                if options.strict_zero_variance && has_nonpositive_q {
                    let q = qs[0];
                    return Err(MfdfaError::ZeroVarianceSegment { scale, offset, q });
                }
                floored += 1;
                VARIANCE_FLOOR
            } else {
                f2
            };
            log_f2.push(f2.ln());
        }
        Ok((qs.iter().map(|&q| power_mean(&log_f2, q)).collect(), floored))
    });

    let mut values = vec![Vec::with_capacity(scale_grid.len()); qs.len()];
    let mut floored_segments = 0;
    for column in columns {
        let (fq, floored) = column?;
        floored_segments += floored;
        for (row, v) in values.iter_mut().zip(fq) {
            row.push(v);
        }
    }
    if floored_segments > 0 {
        warn!("{floored_segments} zero-variance segments floored to {VARIANCE_FLOOR:e}");
    }
    Ok(FluctuationSurface {
        scale_grid: scale_grid.clone(),
        q_grid: q_grid.clone(),
        values,
        detrend_order: order,
        floored_segments,
    })
}

/// Generalized Hurst exponents `h(q)` with per-q fit quality.
#[derive(Debug, Clone, PartialEq)]
pub struct HurstFunction {
    pub q_grid: QGrid,
    pub h: Vec<f64>,
    pub fit_r2: Vec<f64>,
    pub fit_range: (usize, usize),
}

impl HurstFunction {
    /// Build directly from exponents, e.g. closed-form oracles.
    pub fn from_exponents(q_grid: QGrid, h: Vec<f64>) -> Result<Self> {
        if h.len() != q_grid.len() {
            return Err(MfdfaError::InvalidQGrid(format!(
                "{} exponents for {} q values",
                h.len(),
                q_grid.len()
            )));
        }
        let r2 = vec![1.0; h.len()];
        Ok(Self { q_grid, h, fit_r2: r2, fit_range: (0, 0) })
    }

    /// `h(q)` non-increasing in `q` up to `1e-6`. Violations are reported, not rejected.
    pub fn is_monotone(&self) -> bool {
        self.h.windows(2).all(|w| w[1] <= w[0] + 1e-6)
    }

    pub fn at(&self, q: f64) -> Option<f64> {
        self.q_grid
            .values()
            .iter()
            .position(|&v| (v - q).abs() < 1e-12)
            .map(|i| self.h[i])
    }
}

pub const MIN_FIT_SCALES: usize = 5;

/// Slopes of `ln F_q(n)` against `ln n` over scales within `fit_range`
/// (inclusive); `None` uses the whole grid.
pub fn hurst_exponents(
    surface: &FluctuationSurface,
    fit_range: Option<(usize, usize)>,
) -> Result<HurstFunction> {
    let scales = surface.scale_grid.scales();
    let (lo, hi) = fit_range.unwrap_or((scales[0], scales[scales.len() - 1]));
    let picked: Vec<usize> = (0..scales.len())
        .filter(|&i| scales[i] >= lo && scales[i] <= hi)
        .collect();
    if picked.len() < MIN_FIT_SCALES {
        return Err(MfdfaError::InsufficientScales { required: MIN_FIT_SCALES, found: picked.len() });
    }
    let log_n: Vec<f64> = picked.iter().map(|&i| (scales[i] as f64).ln()).collect();
    let mut h = Vec::with_capacity(surface.q_grid.len());
    let mut fit_r2 = Vec::with_capacity(surface.q_grid.len());
    for row in &surface.values {
        let log_f: Vec<f64> = picked.iter().map(|&i| row[i].ln()).collect();
        let fit = ols_line(&log_n, &log_f).ok_or(MfdfaError::InsufficientScales {
            required: MIN_FIT_SCALES,
            found: picked.len(),
        })?;
        h.push(fit.slope);
        fit_r2.push(fit.r2);
    }
    Ok(HurstFunction {
        q_grid: surface.q_grid.clone(),
        h,
        fit_r2,
        fit_range: (scales[picked[0]], scales[picked[picked.len() - 1]]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normal(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn profile_of_constant_is_zero() {
        let p = integrate_profile(&[1.0; 4]).unwrap();
        assert_eq!(p.values(), &[0.0; 4]);
    }

    #[test]
    fn profile_of_alternating_series() {
        let p = integrate_profile(&[1.0, -1.0, 1.0, -1.0]).unwrap();
        assert_eq!(p.values(), &[1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn profile_ends_near_zero() {
        let x = normal(4096, 3);
        let p = integrate_profile(&x).unwrap();
        let max_abs = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(p.values()[4095].abs() <= 1e-9 * 4096.0 * max_abs);
    }

    #[test]
    fn profile_rejects_short_and_nan() {
        assert!(matches!(
            integrate_profile(&[1.0, 2.0, 3.0]),
            Err(MfdfaError::SeriesTooShort { .. })
        ));
        assert_eq!(
            integrate_profile(&[1.0, f64::NAN, 3.0, 4.0]),
            Err(MfdfaError::NonFiniteInput { index: 1 })
        );
    }

    #[test]
    fn linear_profile_linear_detrend() {
        let profile = Profile { values: vec![1.0, 2.0, 3.0, 4.0] };
        let v = detrended_variance(&profile, 4, 0, 1).unwrap();
        assert!(v.abs() < 1e-28);
    }

    #[test]
    fn quadratic_profile_is_removed() {
        let values: Vec<f64> = (0..64).map(|k| 0.3 * (k * k) as f64 - 5.0 * k as f64 + 2.0).collect();
        let scale: f64 = values.iter().map(|v| v * v).sum::<f64>() / 64.0;
        let profile = Profile { values };
        for seg in 0..4 {
            let v = detrended_variance(&profile, 16, seg, 2).unwrap();
            assert!(v <= 1e-18 * scale, "segment {seg}: {v}");
        }
    }

    #[test]
    fn segment_bounds_checked() {
        let profile = integrate_profile(&normal(40, 1)).unwrap();
        assert!(matches!(
            detrended_variance(&profile, 10, 4, 2),
            Err(MfdfaError::SegmentOutOfRange { .. })
        ));
        assert!(matches!(
            detrended_variance(&profile, 3, 0, 2),
            Err(MfdfaError::DegenerateFit { .. })
        ));
    }

    #[test]
    fn q_two_is_rms_of_segment_variances() {
        let x = normal(1000, 9);
        let profile = integrate_profile(&x).unwrap();
        let grid = ScaleGrid::new(vec![10, 25, 50], 1000, 2).unwrap();
        let qs = QGrid::new(vec![2.0]).unwrap();
        for dual_pass in [false, true] {
            let opts = FluctuationOptions { dual_pass, ..Default::default() };
            let surface = fluctuation_function(&profile, &grid, &qs, &opts).unwrap();
            for (j, &n) in grid.scales().iter().enumerate() {
                let offsets = segment_offsets(1000, n, dual_pass);
                let ms: f64 = offsets
                    .iter()
                    .map(|&o| PolyBasis::new(n, 2).unwrap().residual_variance(&profile.values()[o..o + n]))
                    .sum::<f64>()
                    / offsets.len() as f64;
                let rel = (surface.values[0][j] - ms.sqrt()).abs() / ms.sqrt();
                assert!(rel < 1e-12);
            }
        }
    }

    #[test]
    fn single_pass_discards_tail() {
        assert_eq!(segment_offsets(25, 10, false), vec![0, 10]);
        assert_eq!(segment_offsets(25, 10, true), vec![0, 10, 15, 5]);
    }

    #[test]
    fn default_q_grid() {
        let q = QGrid::default();
        assert_eq!(q.len(), 41);
        assert_eq!(q.values()[0], -5.0);
        assert_eq!(q.values()[20], 0.0);
        assert_eq!(q.values()[40], 5.0);
        for (a, b) in q.values().iter().zip(q.values().iter().rev()) {
            assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn scale_grid_validation() {
        assert!(ScaleGrid::new(vec![3, 10], 100, 2).is_err());
        assert!(ScaleGrid::new(vec![10, 10], 100, 2).is_err());
        assert!(ScaleGrid::new(vec![10, 26], 100, 2).is_err());
        let g = ScaleGrid::log_spaced(10, 2048, 30, 8192, 2).unwrap();
        assert_eq!(g.min_scale(), 10);
        assert_eq!(g.max_scale(), 2048);
        assert!(g.len() >= 25 && g.len() <= 30);
    }

    #[test]
    fn exact_power_law_slope() {
        let scales = vec![10, 20, 40, 80, 160];
        let grid = ScaleGrid::new(scales.clone(), 1000, 2).unwrap();
        let q = QGrid::new(vec![-1.0, 1.0]).unwrap();
        let row: Vec<f64> = scales.iter().map(|&n| 3.0 * (n as f64).powf(0.7)).collect();
        let surface = FluctuationSurface {
            scale_grid: grid,
            q_grid: q,
            values: vec![row.clone(), row],
            detrend_order: 2,
            floored_segments: 0,
        };
        let hf = hurst_exponents(&surface, None).unwrap();
        for (h, r2) in hf.h.iter().zip(&hf.fit_r2) {
            assert!((h - 0.7).abs() < 1e-12);
            assert!((r2 - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            hurst_exponents(&surface, Some((10, 80))),
            Err(MfdfaError::InsufficientScales { required: 5, found: 4 })
        ));
    }

    #[test]
    fn zero_variance_is_floored_or_reported() {
        let x: Vec<f64> = (0..200).map(|i| if i < 100 { 0.0 } else { (i as f64).sin() }).collect();
        let profile = integrate_profile(&x).unwrap();
        let grid = ScaleGrid::new(vec![10, 20], 200, 2).unwrap();
        let q = QGrid::new(vec![-2.0, 2.0]).unwrap();
        let surface = fluctuation_function(&profile, &grid, &q, &FluctuationOptions::default()).unwrap();
        assert!(surface.floored_segments > 0);
        assert!(surface.values.iter().flatten().all(|v| v.is_finite() && *v > 0.0));
        let strict = FluctuationOptions { strict_zero_variance: true, ..Default::default() };
        assert!(matches!(
            fluctuation_function(&profile, &grid, &q, &strict),
            Err(MfdfaError::ZeroVarianceSegment { .. })
        ));
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let x = normal(4096, 5);
        let profile = integrate_profile(&x).unwrap();
        let grid = ScaleGrid::log_spaced(10, 1024, 30, 4096, 2).unwrap();
        let q = QGrid::default();
        let seq = FluctuationOptions { execution: Execution::Sequential, ..Default::default() };
        let par = FluctuationOptions { execution: Execution::Parallel, ..Default::default() };
        let a = fluctuation_function(&profile, &grid, &q, &seq).unwrap();
        let b = fluctuation_function(&profile, &grid, &q, &par).unwrap();
        assert_eq!(a.values, b.values);
    }
}
