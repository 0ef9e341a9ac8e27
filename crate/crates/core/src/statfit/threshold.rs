//! Broken-slope regression of the power-law exponent on `a`, compared by AIC
//! against a single straight line fitted to the same points.
//!
//! Threshold model: `phi = beta1 a f + beta2 a (1 - f) + beta3 f + beta0`,
//! `f = 1` when `a >= a_thresh`.

use serde::{Deserialize, Serialize};

use super::ols::linear_fit_aic;
use crate::error::{Error, Result};

pub const DEFAULT_A_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFit {
    pub a_threshold: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta0: f64,
    pub se: [f64; 4],
    pub sigma: f64,
    pub aic_threshold: f64,
    /// Single-line model `phi = beta1 a + beta0`.
    pub linear_beta1: f64,
    pub linear_beta0: f64,
    pub linear_sigma: f64,
    pub aic_linear: f64,
    pub n: usize,
}

impl ThresholdFit {
    pub fn threshold_preferred(&self) -> bool {
        self.aic_threshold < self.aic_linear
    }
}

pub fn threshold_fit(points: &[(f64, f64)], a_threshold: f64) -> Result<ThresholdFit> {
    let above = points.iter().filter(|(a, _)| *a >= a_threshold).count();
    if above == 0 || above == points.len() {
        return Err(Error::Degenerate(format!(
            "threshold fit needs points on both sides of a = {a_threshold}"
        )));
    }
    let y: Vec<f64> = points.iter().map(|&(_, phi)| phi).collect();
    let broken: Vec<Vec<f64>> = points
        .iter()
        .map(|&(a, _)| {
            let f = if a >= a_threshold { 1.0 } else { 0.0 };
            vec![a * f, a * (1.0 - f), f, 1.0]
        })
        .collect();
    let line: Vec<Vec<f64>> = points.iter().map(|&(a, _)| vec![a, 1.0]).collect();
    let thr = linear_fit_aic(&y, &broken)?;
    let lin = linear_fit_aic(&y, &line)?;
    Ok(ThresholdFit {
        a_threshold,
        beta1: thr.betas[0],
        beta2: thr.betas[1],
        beta3: thr.betas[2],
        beta0: thr.betas[3],
        se: [
            thr.std_errors[0],
            thr.std_errors[1],
            thr.std_errors[2],
            thr.std_errors[3],
        ],
        sigma: thr.sigma,
        aic_threshold: thr.aic,
        linear_beta1: lin.betas[0],
        linear_beta0: lin.betas[1],
        linear_sigma: lin.sigma,
        aic_linear: lin.aic,
        n: thr.n,
    })
}
