//! Ordinary least squares with coefficient standard errors and Gaussian AIC.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Relative reciprocal-condition threshold below which a design is treated
/// as collinear.
const RCOND_MIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Residual sum of squares.
    pub rss: f64,
    /// Residual standard error `sqrt(RSS / (n - k))`.
    pub sigma: f64,
    pub n: usize,
    pub df_resid: usize,
    pub aic: f64,
}

impl OlsFit {
    /// Two-sided p-value of `(coef - null) / se` under `t(n - k)`.
    pub fn t_test(&self, index: usize, null: f64) -> (f64, f64) {
        let t = (self.coefficients[index] - null) / self.std_errors[index];
        (t, two_sided_t_pvalue(t, self.df_resid as f64))
    }
}

pub fn two_sided_t_pvalue(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return if t.is_nan() { f64::NAN } else { 0.0 };
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * dist.cdf(-t.abs())).min(1.0)
}

/// Gaussian maximum-likelihood AIC for a linear model with `k` mean
/// coefficients plus the variance: `n ln(RSS/n) + 2(k+1) + n(1 + ln 2pi)`.
pub fn gaussian_aic(rss: f64, n: usize, k: usize) -> f64 {
    let n_f = n as f64;
    n_f * (rss / n_f).ln() + 2.0 * (k as f64 + 1.0) + n_f * (1.0 + (2.0 * std::f64::consts::PI).ln())
}

/// Fits `y = X beta + e`. `rows` holds one design row per observation.
pub fn ols(y: &[f64], rows: &[Vec<f64>]) -> Result<OlsFit> {
    let n = y.len();
    if rows.len() != n {
        return Err(Error::InsufficientData(format!(
            "{} responses but {} design rows",
            n,
            rows.len()
        )));
    }
    let k = rows.first().map_or(0, Vec::len);
    if k == 0 {
        return Err(Error::Degenerate("design has no columns".into()));
    }
    if n < k + 1 {
        return Err(Error::InsufficientData(format!(
            "{n} observations for {k} coefficients"
        )));
    }
    if rows.iter().any(|r| r.len() != k) {
        return Err(Error::Degenerate("ragged design rows".into()));
    }
    if y.iter().chain(rows.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::Estimation("non-finite value in data".into()));
    }

    let x = DMatrix::from_fn(n, k, |i, j| rows[i][j]);
    let yv = DVector::from_column_slice(y);
    // Scale columns to unit norm so the condition check is unit-free.
    let norms: Vec<f64> = (0..k).map(|j| x.column(j).norm()).collect();
    if norms.contains(&0.0) {
        return Err(Error::Degenerate("all-zero regressor".into()));
    }
    let xs = DMatrix::from_fn(n, k, |i, j| x[(i, j)] / norms[j]);
    let xtx = xs.transpose() * &xs;
    let eig = xtx.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(lo > RCOND_MIN * hi) {
        return Err(Error::Degenerate("collinear design".into()));
    }
    let inv = xtx
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular normal equations".into()))?;
    let beta_scaled = &inv * (xs.transpose() * &yv);
    let coefficients: Vec<f64> = (0..k).map(|j| beta_scaled[j] / norms[j]).collect();

    let fitted = &x * DVector::from_column_slice(&coefficients);
    let rss = (&yv - fitted).norm_squared();
    let df_resid = n - k;
    let sigma2 = rss / df_resid as f64;
    let std_errors = (0..k).map(|j| (sigma2 * inv[(j, j)]).sqrt() / norms[j]).collect();

    Ok(OlsFit {
        coefficients,
        std_errors,
        rss,
        sigma: sigma2.sqrt(),
        n,
        df_resid,
        aic: gaussian_aic(rss, n, k),
    })
}

/// Coefficients, residual scale and AIC of a Gaussian linear model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub betas: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub sigma: f64,
    pub aic: f64,
    pub n: usize,
}

pub fn linear_fit_aic(y: &[f64], rows: &[Vec<f64>]) -> Result<LinearFit> {
    let k = rows.first().map_or(0, Vec::len);
    if y.len() < k + 2 {
        return Err(Error::InsufficientData(format!(
            "need at least {} points for {k} coefficients, got {}",
            k + 2,
            y.len()
        )));
    }
    let fit = ols(y, rows)?;
    Ok(LinearFit {
        betas: fit.coefficients,
        std_errors: fit.std_errors,
        sigma: fit.sigma,
        aic: fit.aic,
        n: fit.n,
    })
}

/// Simple regression `y ~ beta1 x + beta0`, returning slope, its standard
/// error and two-sided p-value against zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub se_slope: f64,
    pub p_slope: f64,
    pub n: usize,
}

pub fn slope_fit(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v, 1.0]).collect();
    let fit = ols(y, &rows)?;
    let (_, p) = fit.t_test(0, 0.0);
    Ok(SlopeFit {
        slope: fit.coefficients[0],
        intercept: fit.coefficients[1],
        se_slope: fit.std_errors[0],
        p_slope: p,
        n: fit.n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 2.0).collect();
        let f = slope_fit(&x, &y).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12);
        assert!((f.intercept + 2.0).abs() < 1e-12);
    }

    #[test]
    fn matches_hand_computed_simple_regression() {
        // x = 1..5, y = (2, 4, 5, 4, 5): slope 0.6, intercept 2.2,
        // RSS = 2.4, s^2 = 0.8, Sxx = 10, se(slope) = sqrt(0.08).
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [2.0, 4.0, 5.0, 4.0, 5.0];
        let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v, 1.0]).collect();
        let f = ols(&y, &rows).unwrap();
        assert!((f.coefficients[0] - 0.6).abs() < 1e-12);
        assert!((f.coefficients[1] - 2.2).abs() < 1e-12);
        assert!((f.rss - 2.4).abs() < 1e-12);
        assert!((f.std_errors[0] - 0.08f64.sqrt()).abs() < 1e-12);
        // t = 0.6 / sqrt(0.08) = 2.1213 on 3 df: two-sided p = 0.12402
        let (t, p) = f.t_test(0, 0.0);
        assert!((t - 2.121320).abs() < 1e-5);
        assert!((p - 0.1240).abs() < 1e-3, "p {p}");
    }

    #[test]
    fn collinear_columns_rejected() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let y = [1.0, 2.0, 3.0, 2.0, 1.0, 0.0];
        assert!(matches!(ols(&y, &rows), Err(Error::Degenerate(_))));
    }

    #[test]
    fn aic_formula() {
        let aic = gaussian_aic(2.0, 10, 2);
        let expected = 10.0 * (0.2f64).ln() + 6.0 + 10.0 * (1.0 + (2.0 * std::f64::consts::PI).ln());
        assert!((aic - expected).abs() < 1e-12);
    }

    #[test]
    fn linear_fit_needs_two_spare_points() {
        let rows = vec![vec![1.0, 1.0], vec![2.0, 1.0], vec![3.0, 1.0]];
        assert!(linear_fit_aic(&[1.0, 2.0, 2.5], &rows).is_err());
    }
}
