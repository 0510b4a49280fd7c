//! Small numerical helpers shared by the analysis modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (divides by `n`).
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

pub fn std_population(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Sample standard deviation (divides by `n - 1`); zero for a single value.
pub fn std_sample(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Population covariance.
pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    let mx = mean(xs);
    let my = mean(ys);
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
    /// Root-mean-square of the residuals.
    pub rms_residual: f64,
}

/// Ordinary least-squares straight line through `(x, y)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let slope_se = if x.len() > 2 { (ss_res / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    LineFit {
        slope,
        intercept,
        slope_se,
        rms_residual: (ss_res / n).sqrt(),
    }
}

/// Least-squares solution of `a · x ≈ b` via SVD, with the 2-norm condition
/// number of `a`. A zero-rank matrix reports an infinite condition number.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let svd = a.clone().svd(true, true);
    let s = &svd.singular_values;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let eps = smax * f64::EPSILON * a.nrows().max(a.ncols()) as f64;
    let x = svd
        .solve(b, eps)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()));
    (x, condition)
}

/// Maps an interval onto `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizer {
    pub center: f64,
    pub half_range: f64,
}

impl Normalizer {
    pub fn spanning(values: &[f64]) -> Self {
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let half = 0.5 * (hi - lo);
        Self {
            center: 0.5 * (hi + lo),
            half_range: if half > 0.0 { half } else { 1.0 },
        }
    }

    pub fn apply(&self, v: f64) -> f64 {
        (v - self.center) / self.half_range
    }
}

/// Polynomial in a normalized variable, fitted by least squares.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    /// Coefficients in ascending powers of the normalized variable.
    pub coeffs: Vec<f64>,
    pub norm: Normalizer,
}

impl Polynomial {
    pub fn eval(&self, x: f64) -> f64 {
        let u = self.norm.apply(x);
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }
}

/// Condition numbers above this make a fit unusable.
pub const MAX_CONDITION: f64 = 1e12;

/// Fits `y ≈ p(x)` of the given degree. Fails with `IllConditionedFit` when
/// the Vandermonde system is rank-deficient (too few distinct abscissae).
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<Polynomial> {
    let norm = Normalizer::spanning(x);
    let cols = degree + 1;
    if x.len() < cols {
        return Err(Error::IllConditionedFit { condition: f64::INFINITY });
    }
    let a = DMatrix::from_fn(x.len(), cols, |r, c| norm.apply(x[r]).powi(c as i32));
    let b = DVector::from_column_slice(y);
    let (coef, condition) = lstsq(&a, &b);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditionedFit { condition });
    }
    Ok(Polynomial { coeffs: coef.iter().cloned().collect(), norm })
}

pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// Median of a slice (not required to be sorted); NaN-free input assumed.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_exact() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let fit = fit_line(&x, &y);
        assert!((fit.slope + 0.5).abs() < 1e-14);
        assert!((fit.intercept - 2.0).abs() < 1e-14);
        assert!(fit.rms_residual < 1e-14);
    }

    #[test]
    fn polyfit_recovers_cubic() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 * 4.0).collect();
        let f = |v: f64| 1.0 + 0.1 * v - 1e-3 * v * v + 2e-6 * v * v * v;
        let y: Vec<f64> = x.iter().map(|&v| f(v)).collect();
        let p = polyfit(&x, &y, 6).unwrap();
        for &v in &[0.0, 33.3, 101.0, 196.0] {
            assert!((p.eval(v) - f(v)).abs() < 1e-9);
        }
    }

    #[test]
    fn polyfit_rank_deficient() {
        let x = [1.0, 1.0, 1.0, 2.0];
        let y = [0.0, 0.0, 0.0, 1.0];
        assert!(matches!(polyfit(&x, &y, 3), Err(Error::IllConditionedFit { .. })));
        assert!(matches!(polyfit(&x[..2], &y[..2], 3), Err(Error::IllConditionedFit { .. })));
    }

    #[test]
    fn stats() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert_eq!(variance(&xs), 1.25);
        assert!((std_sample(&xs) - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&xs), 2.5);
        assert_eq!(next_pow2(10_000), 16_384);
    }
}
