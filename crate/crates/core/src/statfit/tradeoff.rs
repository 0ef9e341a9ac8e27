//! Trade-off regression `log N ~ Normal(-a log m + b log u, sigma)`.
//!
//! No intercept. `a` is tested against 1 (the trade-off-free value), `b`
//! against 0.

use serde::{Deserialize, Serialize};

use super::ols::ols;
use crate::error::{invalid, Error, Result};

/// One agent's `(N, m, u)` as the regression consumes it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffObservation {
    pub ties: f64,
    pub mean_strength: f64,
    pub active_days: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffFit {
    pub a_hat: f64,
    pub b_hat: f64,
    pub se_a: f64,
    pub se_b: f64,
    /// `(a_hat - 1) / se_a`
    pub t_a: f64,
    /// `b_hat / se_b`
    pub t_b: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub adj_r2: f64,
    pub sigma_hat: f64,
    pub n: usize,
}

impl TradeoffFit {
    /// Half-width of the two-sided `level` confidence interval for `a` and `b`.
    pub fn ci_half_widths(&self, level: f64) -> (f64, f64) {
        use statrs::distribution::{ContinuousCDF, StudentsT};
        let df = (self.n - 2) as f64;
        let q = StudentsT::new(0.0, 1.0, df)
            .expect("df > 0")
            .inverse_cdf(0.5 + level / 2.0);
        (q * self.se_a, q * self.se_b)
    }
}

pub fn fit_tradeoff(agents: &[TradeoffObservation]) -> Result<TradeoffFit> {
    if agents.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "trade-off fit needs >= 3 agents, got {}",
            agents.len()
        )));
    }
    for (i, ag) in agents.iter().enumerate() {
        if !(ag.mean_strength >= 1.0) {
            return Err(invalid(
                "m",
                format!("agent {i}: mean strength must be >= 1, got {}", ag.mean_strength),
            ));
        }
        if !(ag.ties >= 1.0) {
            return Err(invalid("N", format!("agent {i}: ties must be >= 1, got {}", ag.ties)));
        }
        if !(ag.active_days >= 1.0) {
            return Err(invalid(
                "u",
                format!("agent {i}: participation must be >= 1 day, got {}", ag.active_days),
            ));
        }
    }
    let distinct = |f: fn(&TradeoffObservation) -> f64| {
        let first = f(&agents[0]);
        agents.iter().any(|ag| f(ag) != first)
    };
    if !distinct(|ag| ag.mean_strength) || !distinct(|ag| ag.active_days) {
        return Err(Error::Degenerate(
            "collinear design: m or u takes a single value".into(),
        ));
    }

    let y: Vec<f64> = agents.iter().map(|ag| ag.ties.ln()).collect();
    let rows: Vec<Vec<f64>> = agents
        .iter()
        .map(|ag| vec![-ag.mean_strength.ln(), ag.active_days.ln()])
        .collect();
    let fit = ols(&y, &rows)?;
    let (t_a, p_a) = fit.t_test(0, 1.0);
    let (t_b, p_b) = fit.t_test(1, 0.0);

    // Uncentered R^2 for a model without intercept.
    let n = y.len() as f64;
    let tss: f64 = y.iter().map(|v| v * v).sum();
    let r2 = if tss > 0.0 { 1.0 - fit.rss / tss } else { f64::NAN };
    let adj_r2 = 1.0 - (1.0 - r2) * n / (n - 2.0);

    Ok(TradeoffFit {
        a_hat: fit.coefficients[0],
        b_hat: fit.coefficients[1],
        se_a: fit.std_errors[0],
        se_b: fit.std_errors[1],
        t_a,
        t_b,
        p_a,
        p_b,
        adj_r2,
        sigma_hat: fit.sigma,
        n: fit.n,
    })
}
