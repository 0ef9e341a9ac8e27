//! Populations of groomers with per-agent `(C_i, N_i)`, either taken from an
//! ingested data-set or generated to resemble the Twitter data-set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::AgentSummary;
use crate::model::GroomerSpec;
use crate::statfit::quantile_sorted;

/// Regression coefficients reported for Twitter.
pub const TWITTER_A: f64 = 1.18957;
pub const TWITTER_B: f64 = 1.30935;
/// Observation window assumed for the Twitter-like population, in days.
pub const TWITTER_LIKE_HORIZON: u32 = 120;
pub const TWITTER_LIKE_SIZE: usize = 200;
/// Fixed so every master seed sees the same synthetic population.
pub const TWITTER_LIKE_SEED: u64 = 0x7717_7e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub active_days: u32,
    pub cost: f64,
    pub ties: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub horizon: u32,
    pub b: f64,
    pub members: Vec<Member>,
}

impl Population {
    /// Synthetic stand-in for the Twitter data-set: participation days
    /// log-uniform on `[1, T]`, `C = u^b`, mean strength log-uniform on
    /// `[1, min(u, C^(1/a))]`, and `N = C / m^a` rounded, so that every
    /// member sits on the fitted trade-off surface with `N <= C`.
    pub fn twitter_like(size: usize, horizon: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = f64::from(horizon.max(1)).ln();
        let members = (0..size)
            .map(|_| {
                let u = (rng.random::<f64>() * top).exp().round().max(1.0);
                let cost = u.powf(TWITTER_B);
                let m_max = u.min(cost.powf(1.0 / TWITTER_A));
                let m = (rng.random::<f64>() * m_max.ln()).exp();
                let ties = (cost / m.powf(TWITTER_A)).round().clamp(1.0, cost.floor());
                Member {
                    active_days: u as u32,
                    cost,
                    ties: ties as u32,
                }
            })
            .collect();
        Self {
            horizon,
            b: TWITTER_B,
            members,
        }
    }

    pub fn twitter_default() -> Self {
        Self::twitter_like(TWITTER_LIKE_SIZE, TWITTER_LIKE_HORIZON, TWITTER_LIKE_SEED)
    }

    /// Population from ingested agents with `C_i = u_i^b`.
    pub fn from_agents(agents: &[AgentSummary], b: f64, horizon: u32) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::InsufficientData("no agents".into()));
        }
        let members = agents
            .iter()
            .map(|a| Member {
                active_days: a.active_days,
                cost: f64::from(a.active_days).powf(b),
                ties: a.ties,
            })
            .collect();
        Ok(Self { horizon, b, members })
    }

    /// 75th percentile of `C = u^b`, the shared cost of calibration groomers.
    pub fn calibration_cost(&self) -> f64 {
        let mut costs: Vec<f64> = self.members.iter().map(|m| m.cost).collect();
        costs.sort_by(f64::total_cmp);
        quantile_sorted(&costs, 0.75)
    }

    /// Groomer specs at exponent `a`. Members with `C < N` would need a mean
    /// strength below one day and are left out; the returned indices map
    /// specs back to members.
    pub fn specs(&self, a: f64) -> Result<(Vec<GroomerSpec>, Vec<usize>)> {
        let mut specs = Vec::with_capacity(self.members.len());
        let mut index = Vec::with_capacity(self.members.len());
        for (i, m) in self.members.iter().enumerate() {
            if m.ties == 0 || m.cost < f64::from(m.ties) {
                continue;
            }
            specs.push(GroomerSpec::new(specs.len(), m.cost, m.ties, a)?);
            index.push(i);
        }
        if specs.is_empty() {
            return Err(Error::InsufficientData("no member has C >= N".into()));
        }
        Ok((specs, index))
    }
}
