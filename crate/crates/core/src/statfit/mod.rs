//! Statistical estimation: trade-off regression, alpha calibration,
//! power-law fitting, hierarchy ratios, threshold regression and AIC.

pub mod alpha;
pub mod correlation;
pub mod hierarchy;
pub mod ols;
pub mod powerlaw;
pub mod threshold;
pub mod tradeoff;

pub use alpha::{optimize_alpha, sim_error, spec_targets, AlphaOptimum, AlphaSearch};
pub use correlation::{budget_correlation, pearson, Correlation};
pub use hierarchy::{hierarchy_profile, hierarchy_ratios, HierarchyMode, HierarchyProfile};
pub use ols::{linear_fit_aic, slope_fit, LinearFit, SlopeFit};
pub use powerlaw::{fit_powerlaw, PowerLawFit};
pub use threshold::{threshold_fit, ThresholdFit, DEFAULT_A_THRESHOLD};
pub use tradeoff::{fit_tradeoff, TradeoffFit, TradeoffObservation};

/// Linear-interpolation quantile of sorted data (`q` in `[0, 1]`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        }
    }
}

/// Empirical `P(X >= x)` at each distinct value of `values`, ascending.
pub fn ccdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        if out.last().is_none_or(|&(x, _)| x != v) {
            out.push((v, (n - i as f64) / n));
        }
    }
    out
}

/// Mean and sample standard deviation (`sd = 0` for a single value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}
