//! Closed-form pieces of the trade-off model `C = N m^a`.
//!
//! `v(w) = alpha w + 1` prices one grooming act on a tie of density `w`;
//! `G(a, alpha; C, m) = alpha C (m^(1-a) - m^(-a)) / T` is the daily amount a
//! groomer spends reinforcing existing ties.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Parameters shared by every groomer in one simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Trade-off exponent `a` (> 0).
    pub a: f64,
    /// Slope `alpha` of the per-act grooming amount (>= 0).
    pub alpha: f64,
    /// Observation horizon `T` in days.
    pub horizon: u32,
    /// Cost exponent `b` in `C = u^b`; only used when deriving costs.
    pub b: f64,
}

impl ModelParams {
    pub fn new(a: f64, alpha: f64, horizon: u32) -> Result<Self> {
        let params = Self {
            a,
            alpha,
            horizon,
            b: 1.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_b(mut self, b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(invalid("b", format!("must be finite, got {b}")));
        }
        self.b = b;
        Ok(self)
    }

    /// `T = 0` is accepted: a zero-day run leaves every groomer at its
    /// initial tie. Anything that divides by `T` rejects it separately.
    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(invalid("a", format!("must be > 0, got {}", self.a)));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(invalid("alpha", format!("must be >= 0, got {}", self.alpha)));
        }
        if !self.b.is_finite() {
            return Err(invalid("b", format!("must be finite, got {}", self.b)));
        }
        Ok(())
    }
}

/// One groomer's budget-defining inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroomerSpec {
    pub id: usize,
    /// Total grooming cost `C`.
    pub cost: f64,
    /// Intended number of ties at the end of the horizon.
    pub target_ties: u32,
    /// `(C / N_target)^(1/a)`, fixed at construction.
    pub target_mean: f64,
}

impl GroomerSpec {
    pub fn new(id: usize, cost: f64, target_ties: u32, a: f64) -> Result<Self> {
        let target_mean = target_mean_strength(cost, f64::from(target_ties), a)?;
        Ok(Self {
            id,
            cost,
            target_ties,
            target_mean,
        })
    }

    /// Daily reinforcement budget for this groomer under `params`.
    pub fn daily_budget(&self, params: &ModelParams) -> Result<f64> {
        grooming_budget(params, self.cost, self.target_mean)
    }
}

/// Amount of grooming one act costs on a tie with density `w`: `alpha w + 1`.
pub fn grooming_cost(w: f64, alpha: f64) -> Result<f64> {
    if !(w.is_finite() && w >= 0.0) {
        return Err(invalid("w", format!("density must be >= 0, got {w}")));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(invalid("alpha", format!("must be >= 0, got {alpha}")));
    }
    Ok(alpha * w + 1.0)
}

/// Daily reinforcement budget `G(a, alpha; C, m)`.
pub fn grooming_budget(params: &ModelParams, cost: f64, mean_strength: f64) -> Result<f64> {
    params.validate()?;
    if params.horizon == 0 {
        return Err(invalid("horizon", "budget needs T >= 1"));
    }
    if !(cost.is_finite() && cost > 0.0) {
        return Err(invalid("C", format!("must be > 0, got {cost}")));
    }
    if !(mean_strength.is_finite() && mean_strength >= 1.0) {
        return Err(invalid(
            "m",
            format!("mean strength must be >= 1 day, got {mean_strength}"),
        ));
    }
    let m = mean_strength;
    let shape = m.powf(1.0 - params.a) - m.powf(-params.a);
    // m^(1-a) >= m^(-a) for m >= 1; clamp rounding noise at m = 1.
    Ok((params.alpha * cost * shape / f64::from(params.horizon)).max(0.0))
}

/// `(C / N)^(1/a)`: the mean strength a groomer with cost `C` and `N` ties
/// sits at on the trade-off surface.
pub fn target_mean_strength(cost: f64, ties: f64, a: f64) -> Result<f64> {
    if !(cost.is_finite() && cost > 0.0) {
        return Err(invalid("C", format!("must be > 0, got {cost}")));
    }
    if !(ties.is_finite() && ties >= 1.0) {
        return Err(invalid("N", format!("must be >= 1, got {ties}")));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(invalid("a", format!("must be > 0, got {a}")));
    }
    Ok((cost / ties).powf(1.0 / a))
}

/// Location of the maximum of `G` over `m` when `a > 1`: `a / (a - 1)`.
/// `None` for `a <= 1`, where `G` increases without bound.
pub fn budget_peak(a: f64) -> Option<f64> {
    (a > 1.0).then(|| a / (a - 1.0))
}
