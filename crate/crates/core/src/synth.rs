//! Synthetic series with known scaling: the binomial multiplicative cascade
//! and fractional Gaussian noise.
//!
//! All randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{MfdfaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeSpec {
    /// Mass fraction sent to one half at every split, in `[0.5, 1)`.
    pub multiplier: f64,
    /// Output length is `2^levels`.
    pub levels: u32,
    pub seed: u64,
}

impl CascadeSpec {
    fn validate(&self) -> Result<()> {
        if !(self.multiplier >= 0.5 && self.multiplier < 1.0) {
            return Err(MfdfaError::InvalidSpec(format!(
                "cascade multiplier {} outside [0.5, 1)",
                self.multiplier
            )));
        }
        if self.levels == 0 || self.levels > 26 {
            return Err(MfdfaError::InvalidSpec(format!("cascade levels {} outside 1..=26", self.levels)));
        }
        Ok(())
    }
}

/// Binomial measure on `2^levels` cells. At every split one child gets
/// fraction `a` and the other `1 - a`; the seed only picks which side.
pub fn gen_binomial_cascade(spec: &CascadeSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let a = spec.multiplier;
    let b = 1.0 - a;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut measure = vec![1.0];
    for _ in 0..spec.levels {
        let mut next = Vec::with_capacity(measure.len() * 2);
        for m in &measure {
            if rng.random::<bool>() {
                next.extend([m * a, m * b]);
            } else {
                next.extend([m * b, m * a]);
            }
        }
        measure = next;
    }
    Ok(measure)
}

/// `tau(q) = -ln(a^q + (1-a)^q) / ln 2` for the binomial measure.
pub fn cascade_tau(a: f64, q: f64) -> f64 {
    -(a.powf(q) + (1.0 - a).powf(q)).ln() / std::f64::consts::LN_2
}

/// `h(q) = (tau(q) + 1) / q`, with its `q -> 0` limit `-(ln a + ln(1-a)) / (2 ln 2)`.
pub fn cascade_hurst(a: f64, q: f64) -> f64 {
    if q.abs() < 1e-12 {
        -(a.ln() + (1.0 - a).ln()) / (2.0 * std::f64::consts::LN_2)
    } else {
        (cascade_tau(a, q) + 1.0) / q
    }
}

/// Closed-form Legendre pair `(alpha(q), f(alpha(q)))`.
pub fn cascade_spectrum_point(a: f64, q: f64) -> (f64, f64) {
    let b = 1.0 - a;
    let (aq, bq) = (a.powf(q), b.powf(q));
    let alpha = -(aq * a.ln() + bq * b.ln()) / ((aq + bq) * std::f64::consts::LN_2);
    (alpha, q * alpha - cascade_tau(a, q))
}

/// Full support width `ln(a / (1-a)) / ln 2` of the binomial spectrum.
pub fn cascade_width(a: f64) -> f64 {
    (a / (1.0 - a)).ln() / std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub len: usize,
    /// 0.5 gives iid noise; other values in (0, 1) give fractional Gaussian noise.
    pub hurst: f64,
    pub seed: u64,
}

fn fgn_autocovariance(hurst: f64, lag: usize) -> f64 {
    let k = lag as f64;
    let two_h = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

/// Standardized (sample mean 0, sample variance 1) Gaussian noise. iid for
/// `H = 0.5`, otherwise exact fractional Gaussian noise by circulant
/// embedding of the autocovariance.
pub fn gen_gaussian_noise(spec: &NoiseSpec) -> Result<Vec<f64>> {
    if spec.len < 2 {
        return Err(MfdfaError::InvalidSpec(format!("noise length {} below 2", spec.len)));
    }
    if !(spec.hurst > 0.0 && spec.hurst < 1.0) {
        return Err(MfdfaError::InvalidSpec(format!("Hurst exponent {} outside (0, 1)", spec.hurst)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut x: Vec<f64> = if spec.hurst == 0.5 {
        (0..spec.len).map(|_| StandardNormal.sample(&mut rng)).collect()
    } else {
        circulant_fgn(spec.len, spec.hurst, &mut rng)?
    };
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    x.iter_mut().for_each(|v| *v = (*v - mean) / sd);
    Ok(x)
}

fn circulant_fgn(len: usize, hurst: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let m = 2 * len;
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|j| {
            let lag = if j <= len { j } else { m - j };
            Complex::new(fgn_autocovariance(hurst, lag), 0.0)
        })
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    fft.process(&mut row);
    let min_eigenvalue = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -1e-9 {
        return Err(MfdfaError::SynthesisFailure { min_eigenvalue });
    }
    let eig: Vec<f64> = row.iter().map(|c| c.re.max(0.0)).collect();

    let mut w = vec![Complex::new(0.0, 0.0); m];
    let mut gauss = || -> f64 { StandardNormal.sample(&mut *rng) };
    let mf = m as f64;
    w[0] = Complex::new((eig[0] / mf).sqrt() * gauss(), 0.0);
    w[m / 2] = Complex::new((eig[m / 2] / mf).sqrt() * gauss(), 0.0);
    for k in 1..m / 2 {
        let s = (eig[k] / (2.0 * mf)).sqrt();
        w[k] = Complex::new(s * gauss(), s * gauss());
        w[m - k] = w[k].conj();
    }
    fft.process(&mut w);
    Ok(w[..len].iter().map(|c| c.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cascade_mass_is_conserved() {
        for a in [0.5, 0.6, 0.75] {
            let m = gen_binomial_cascade(&CascadeSpec { multiplier: a, levels: 13, seed: 1 }).unwrap();
            assert_eq!(m.len(), 8192);
            assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn half_cascade_is_constant() {
        let m = gen_binomial_cascade(&CascadeSpec { multiplier: 0.5, levels: 6, seed: 4 }).unwrap();
        assert!(m.iter().all(|&v| v == 1.0 / 64.0));
        assert!((cascade_hurst(0.5, 2.0) - 1.0).abs() < 1e-12);
        assert!((cascade_hurst(0.5, -3.0) - 1.0).abs() < 1e-12);
        assert!((cascade_hurst(0.5, 0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cascade_closed_forms_are_consistent() {
        let a = 0.6;
        // h is continuous through q = 0
        assert!((cascade_hurst(a, 1e-6) - cascade_hurst(a, 0.0)).abs() < 1e-5);
        // alpha is the numerical derivative of tau
        for q in [-4.0, -1.0, 0.0, 2.5] {
            let d = (cascade_tau(a, q + 1e-5) - cascade_tau(a, q - 1e-5)) / 2e-5;
            let (alpha, f) = cascade_spectrum_point(a, q);
            assert!((alpha - d).abs() < 1e-6);
            assert!(f <= 1.0 + 1e-12);
        }
        let (_, f0) = cascade_spectrum_point(a, 0.0);
        assert!((f0 - 1.0).abs() < 1e-12);
        assert!(cascade_width(0.7) > cascade_width(0.6));
    }

    #[test]
    fn cascade_determinism_and_seed_effect() {
        let spec = CascadeSpec { multiplier: 0.7, levels: 10, seed: 3 };
        assert_eq!(gen_binomial_cascade(&spec).unwrap(), gen_binomial_cascade(&spec).unwrap());
        let other = CascadeSpec { seed: 4, ..spec };
        assert_ne!(gen_binomial_cascade(&spec).unwrap(), gen_binomial_cascade(&other).unwrap());
    }

    #[test]
    fn invalid_specs() {
        assert!(gen_binomial_cascade(&CascadeSpec { multiplier: 0.4, levels: 5, seed: 0 }).is_err());
        assert!(gen_binomial_cascade(&CascadeSpec { multiplier: 1.0, levels: 5, seed: 0 }).is_err());
        assert!(gen_gaussian_noise(&NoiseSpec { len: 100, hurst: 1.0, seed: 0 }).is_err());
    }

    #[test]
    fn noise_is_standardized_and_deterministic() {
        for h in [0.3, 0.5, 0.7, 0.9] {
            let spec = NoiseSpec { len: 4096, hurst: h, seed: 11 };
            let x = gen_gaussian_noise(&spec).unwrap();
            let n = x.len() as f64;
            let mean = x.iter().sum::<f64>() / n;
            let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            assert!(mean.abs() < 5.0 / n.sqrt());
            assert!((var - 1.0).abs() < 5.0 / n.sqrt());
            assert_eq!(x, gen_gaussian_noise(&spec).unwrap());
        }
    }

    #[test]
    fn fgn_lag_one_correlation() {
        // rho(1) = 2^(2H-1) - 1
        let h = 0.8;
        let mut acc = 0.0;
        for seed in 0..10 {
            let x = gen_gaussian_noise(&NoiseSpec { len: 8192, hurst: h, seed }).unwrap();
            acc += x.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (x.len() - 1) as f64;
        }
        let expected = 2f64.powf(2.0 * h - 1.0) - 1.0;
        assert!((acc / 10.0 - expected).abs() < 0.03, "{} vs {expected}", acc / 10.0);
    }
}
