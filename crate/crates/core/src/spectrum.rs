//! Rényi exponents, the Legendre transform to the singularity spectrum, and
//! the quartic model from which the complexity parameters `(alpha0, W, r)`
//! are read off.

use serde::{Deserialize, Serialize};

use crate::error::{MfdfaError, Result};
use crate::fluctuation::{HurstFunction, QGrid};
use crate::numeric::{least_squares, poly_derivative, poly_eval, real_roots_in};

/// Spectra whose alpha range is below this width are treated as monofractal.
pub const DEGENERATE_ALPHA_RANGE: f64 = 1e-3;
/// Half-width of the interval around `alpha0` searched for the quartic's zeros.
pub const ROOT_SEARCH_HALF_WIDTH: f64 = 2.0;
pub const MIN_SPECTRUM_POINTS: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct RenyiFunction {
    pub q_grid: QGrid,
    pub tau: Vec<f64>,
}

impl RenyiFunction {
    /// Concavity of `tau` on the (possibly non-uniform) grid: successive
    /// chord slopes never increase by more than `1e-9`.
    pub fn is_concave(&self) -> bool {
        let q = self.q_grid.values();
        let slopes: Vec<f64> = (1..q.len())
            .map(|i| (self.tau[i] - self.tau[i - 1]) / (q[i] - q[i - 1]))
            .collect();
        slopes.windows(2).all(|w| w[1] <= w[0] + 1e-9)
    }
}

pub fn renyi_exponents(hurst: &HurstFunction) -> RenyiFunction {
    let tau = hurst
        .q_grid
        .values()
        .iter()
        .zip(&hurst.h)
        .map(|(q, h)| q * h - 1.0)
        .collect();
    RenyiFunction { q_grid: hurst.q_grid.clone(), tau }
}

/// Discrete `(alpha, f(alpha))` points, one per interior q.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularitySpectrum {
    pub alpha: Vec<f64>,
    pub f_alpha: Vec<f64>,
    pub source_q: Vec<f64>,
}

impl SingularitySpectrum {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha_range(&self) -> f64 {
        let (lo, hi) = self
            .alpha
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| (lo.min(a), hi.max(a)));
        hi - lo
    }

    /// `alpha(q)` non-increasing in `q`, as required by a concave `tau`.
    pub fn is_alpha_monotone(&self) -> bool {
        self.alpha.windows(2).all(|w| w[1] <= w[0] + 1e-9)
    }
}

/// `alpha = d tau / dq` by three-point central differences (exact for
/// quadratics on non-uniform grids), `f = q alpha - tau`. Endpoints dropped.
pub fn legendre_transform(renyi: &RenyiFunction) -> Result<SingularitySpectrum> {
    let q = renyi.q_grid.values();
    let tau = &renyi.tau;
    if q.len() < 3 {
        return Err(MfdfaError::GridTooSmall(q.len()));
    }
    let interior = q.len() - 2;
    let mut spectrum = SingularitySpectrum {
        alpha: Vec::with_capacity(interior),
        f_alpha: Vec::with_capacity(interior),
        source_q: Vec::with_capacity(interior),
    };
    for i in 1..q.len() - 1 {
        let (h1, h2) = (q[i] - q[i - 1], q[i + 1] - q[i]);
        let alpha = -h2 / (h1 * (h1 + h2)) * tau[i - 1]
            + (h2 - h1) / (h1 * h2) * tau[i]
            + h1 / (h2 * (h1 + h2)) * tau[i + 1];
        spectrum.alpha.push(alpha);
        spectrum.f_alpha.push(q[i] * alpha - tau[i]);
        spectrum.source_q.push(q[i]);
    }
    Ok(spectrum)
}

/// `f(alpha) = A + B u + C u^2 + D u^3 + E u^4` with `u = alpha - alpha0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticFit {
    /// `[A, B, C, D, E]`
    pub coeffs: [f64; 5],
    pub alpha0: f64,
}

impl QuarticFit {
    pub fn eval(&self, alpha: f64) -> f64 {
        poly_eval(&self.coeffs, alpha - self.alpha0)
    }

    pub fn derivative(&self, alpha: f64) -> f64 {
        poly_eval(&poly_derivative(&self.coeffs), alpha - self.alpha0)
    }

    pub fn second_derivative(&self, alpha: f64) -> f64 {
        poly_eval(&poly_derivative(&poly_derivative(&self.coeffs)), alpha - self.alpha0)
    }
}

fn fit_about(spectrum: &SingularitySpectrum, center: f64) -> Result<[f64; 5]> {
    let spread = spectrum
        .alpha
        .iter()
        .map(|a| (a - center).abs())
        .fold(0.0f64, f64::max);
    let design: Vec<f64> = spectrum
        .alpha
        .iter()
        .flat_map(|a| {
            let s = (a - center) / spread;
            [1.0, s, s * s, s * s * s, s * s * s * s]
        })
        .collect();
    let beta = least_squares(&design, 5, &spectrum.f_alpha).ok_or(MfdfaError::DegenerateSpectrum {
        range: spectrum.alpha_range(),
    })?;
    let mut coeffs = [0.0; 5];
    for (k, b) in beta.iter().enumerate() {
        coeffs[k] = b / spread.powi(k as i32);
    }
    Ok(coeffs)
}

/// Unweighted least-squares quartic. `alpha0` is seeded at the discrete
/// argmax of `f`, moved to the fitted curve's nearest maximum, and the fit
/// is repeated about that point.
pub fn fit_quartic(spectrum: &SingularitySpectrum) -> Result<QuarticFit> {
    if spectrum.len() < MIN_SPECTRUM_POINTS {
        return Err(MfdfaError::TooFewSpectrumPoints(spectrum.len()));
    }
    let range = spectrum.alpha_range();
    if !(range > DEGENERATE_ALPHA_RANGE) {
        return Err(MfdfaError::DegenerateSpectrum { range });
    }
    let argmax = spectrum
        .f_alpha
        .iter()
        .enumerate()
        .fold(0, |best, (i, f)| if *f > spectrum.f_alpha[best] { i } else { best });
    let seed = spectrum.alpha[argmax];
    let coeffs = fit_about(spectrum, seed)?;

    let slope = poly_derivative(&coeffs);
    let curvature = poly_derivative(&slope);
    let apex = real_roots_in(&slope, -ROOT_SEARCH_HALF_WIDTH, ROOT_SEARCH_HALF_WIDTH)
        .into_iter()
        .filter(|&u| poly_eval(&curvature, u) < 0.0)
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .ok_or(MfdfaError::NoMaximum)?;
    let alpha0 = seed + apex;
    let coeffs = fit_about(spectrum, alpha0)?;
    Ok(QuarticFit { coeffs, alpha0 })
}

/// Position, width and skew of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityParams {
    pub alpha0: f64,
    pub width: f64,
    pub skew: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Monofractal collapse: `width` is 0 and `skew` is reported as 1.
    pub degenerate: bool,
}

impl ComplexityParams {
    pub fn degenerate_at(alpha0: f64) -> Self {
        Self {
            alpha0,
            width: 0.0,
            skew: 1.0,
            alpha_min: alpha0,
            alpha_max: alpha0,
            degenerate: true,
        }
    }
}

/// Zeros of the fitted quartic nearest `alpha0` on either side, searched in
/// `[alpha0 - 2, alpha0 + 2]`.
pub fn complexity_params(fit: &QuarticFit) -> Result<ComplexityParams> {
    let roots = real_roots_in(&fit.coeffs, -ROOT_SEARCH_HALF_WIDTH, ROOT_SEARCH_HALF_WIDTH);
    let left = roots
        .iter()
        .copied()
        .rfind(|&u| u < 0.0)
        .ok_or(MfdfaError::NoRealRootLeft { alpha0: fit.alpha0 })?;
    let right = roots
        .iter()
        .copied()
        .find(|&u| u > 0.0)
        .ok_or(MfdfaError::NoRealRootRight { alpha0: fit.alpha0 })?;
    let (alpha_min, alpha_max) = (fit.alpha0 + left, fit.alpha0 + right);
    Ok(ComplexityParams {
        alpha0: fit.alpha0,
        width: alpha_max - alpha_min,
        skew: right / -left,
        alpha_min,
        alpha_max,
        degenerate: false,
    })
}

/// Quartic fit and parameters, with a degenerate spectrum mapped to
/// `W = 0, r = 1` at the mean alpha.
pub fn spectrum_params(spectrum: &SingularitySpectrum) -> Result<(Option<QuarticFit>, ComplexityParams)> {
    match fit_quartic(spectrum) {
        Ok(fit) => Ok((Some(fit), complexity_params(&fit)?)),
        Err(MfdfaError::DegenerateSpectrum { .. }) => {
            let mean = spectrum.alpha.iter().sum::<f64>() / spectrum.len() as f64;
            Ok((None, ComplexityParams::degenerate_at(mean)))
        }
        Err(e) => Err(e),
    }
}
