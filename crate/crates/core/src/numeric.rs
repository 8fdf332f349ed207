//! Small numerical kernels shared by the fluctuation and spectrum stages:
//! orthonormal polynomial bases for segment detrending, ordinary least
//! squares, and real-root isolation for low-degree polynomials.

use crate::error::{MfdfaError, Result};

/// Orthonormal basis of polynomials of degree `0..=order` sampled on `len`
/// equispaced abscissae mapped onto `[-1, 1]`.
///
/// Projecting a segment onto this basis is the least-squares polynomial fit;
/// the residual is what remains after subtracting the projection.
#[derive(Debug, Clone)]
pub struct PolyBasis {
    len: usize,
    columns: Vec<Vec<f64>>,
}

impl PolyBasis {
    pub fn new(len: usize, order: usize) -> Result<Self> {
        if len < order + 2 {
            return Err(MfdfaError::DegenerateFit { order, points: len });
        }
        let abscissa: Vec<f64> = (0..len)
            .map(|k| (2.0 * k as f64 - (len - 1) as f64) / (len - 1) as f64)
            .collect();
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
        for degree in 0..=order {
            let mut col: Vec<f64> = abscissa.iter().map(|t| t.powi(degree as i32)).collect();
            let raw_norm = norm(&col);
            // two rounds of modified Gram-Schmidt
            for _ in 0..2 {
                for q in &columns {
                    let proj = dot(q, &col);
                    col.iter_mut().zip(q).for_each(|(c, qv)| *c -= proj * qv);
                }
            }
            let n = norm(&col);
            if !(n > 1e-10 * raw_norm) {
                return Err(MfdfaError::DegenerateFit { order, points: len });
            }
            col.iter_mut().for_each(|c| *c /= n);
            columns.push(col);
        }
        Ok(Self { len, columns })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Mean squared residual of `segment` after removing its best-fit polynomial.
    pub fn residual_variance(&self, segment: &[f64]) -> f64 {
        debug_assert_eq!(segment.len(), self.len);
        let mut resid = segment.to_vec();
        for q in &self.columns {
            let proj = dot(q, &resid);
            resid.iter_mut().zip(q).for_each(|(r, qv)| *r -= proj * qv);
        }
        resid.iter().map(|r| r * r).sum::<f64>() / self.len as f64
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Slope, intercept and coefficient of determination of `y ~ x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn ols_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy <= 0.0 {
        1.0
    } else {
        ((sxy * sxy) / (sxx * syy)).clamp(0.0, 1.0)
    };
    Some(LineFit { slope, intercept: my - slope * mx, r2 })
}

/// Least-squares solution of the overdetermined system `design * beta = rhs`
/// via Householder QR. `design` is row-major with `cols` columns.
pub fn least_squares(design: &[f64], cols: usize, rhs: &[f64]) -> Option<Vec<f64>> {
    let rows = rhs.len();
    if rows < cols || design.len() != rows * cols {
        return None;
    }
    let mut a = design.to_vec();
    let mut b = rhs.to_vec();
    for j in 0..cols {
        let col_norm = (j..rows).map(|i| a[i * cols + j].powi(2)).sum::<f64>().sqrt();
        if col_norm == 0.0 {
            return None;
        }
        let alpha = if a[j * cols + j] > 0.0 { -col_norm } else { col_norm };
        let mut v: Vec<f64> = (j..rows).map(|i| a[i * cols + j]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for k in j..cols {
            let s: f64 = (j..rows).map(|i| v[i - j] * a[i * cols + k]).sum::<f64>() * 2.0 / vnorm2;
            for i in j..rows {
                a[i * cols + k] -= s * v[i - j];
            }
        }
        let s: f64 = (j..rows).map(|i| v[i - j] * b[i]).sum::<f64>() * 2.0 / vnorm2;
        for i in j..rows {
            b[i] -= s * v[i - j];
        }
    }
    let mut beta = vec![0.0; cols];
    for j in (0..cols).rev() {
        let diag = a[j * cols + j];
        if diag.abs() < 1e-14 {
            return None;
        }
        let s: f64 = ((j + 1)..cols).map(|k| a[j * cols + k] * beta[k]).sum();
        beta[j] = (b[j] - s) / diag;
    }
    Some(beta)
}

/// Evaluate `c[0] + c[1] x + c[2] x^2 + ...` by Horner's rule.
pub fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

/// All real roots of the polynomial in `[lo, hi]`, ascending.
///
/// Roots of the derivative split the interval into monotone pieces; each
/// piece holds at most one root, located by bisection. Double roots that
/// touch zero without crossing are reported when they land within `1e-12`
/// of zero at a critical point.
pub fn real_roots_in(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last() == Some(&0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    if c.len() == 2 {
        let root = -c[0] / c[1];
        return if (lo..=hi).contains(&root) { vec![root] } else { Vec::new() };
    }
    let mut breaks = vec![lo];
    breaks.extend(real_roots_in(&poly_derivative(&c), lo, hi));
    breaks.push(hi);

    let mut roots: Vec<f64> = Vec::new();
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (fa, fb) = (poly_eval(&c, a), poly_eval(&c, b));
        let candidate = if fa == 0.0 {
            Some(a)
        } else if fa * fb < 0.0 {
            Some(bisect(&c, a, b))
        } else if fb == 0.0 {
            Some(b)
        } else if fa.abs() < 1e-12 && a > lo {
            Some(a)
        } else {
            None
        };
        if let Some(r) = candidate {
            if roots.last().is_none_or(|last| (r - last).abs() > 1e-12) {
                roots.push(r);
            }
        }
    }
    roots
}

fn bisect(c: &[f64], mut a: f64, mut b: f64) -> f64 {
    let mut fa = poly_eval(c, a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = poly_eval(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
        if b - a < 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}
