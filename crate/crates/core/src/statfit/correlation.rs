use serde::{Deserialize, Serialize};

use super::ols::two_sided_t_pvalue;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

/// Pearson correlation with a two-sided `t(n - 2)` p-value.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(invalid("y", format!("length {} != {}", y.len(), x.len())));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "correlation needs >= 3 pairs, got {n}"
        )));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::Degenerate("zero variance".into()));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p = if r.abs() >= 1.0 {
        0.0
    } else {
        two_sided_t_pvalue(r * (df / (1.0 - r * r)).sqrt(), df)
    };
    Ok(Correlation { r, p, n })
}

/// Correlation of `log G` predicted by the model with the observed `log G_i`.
/// Inputs are the positive budgets themselves; logs are taken here.
pub fn budget_correlation(predicted: &[f64], actual: &[f64]) -> Result<Correlation> {
    if let Some(v) = predicted.iter().chain(actual).find(|v| !(**v > 0.0)) {
        return Err(invalid("G", format!("budgets must be positive, got {v}")));
    }
    let lp: Vec<f64> = predicted.iter().map(|v| v.ln()).collect();
    let la: Vec<f64> = actual.iter().map(|v| v.ln()).collect();
    pearson(&lp, &la)
}
