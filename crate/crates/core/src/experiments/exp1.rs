//! Fitting the model to one data-set: calibrate `alpha` on groomers of a
//! common cost, then re-simulate every agent with its own `(C_i, N_i)`.

use serde::{Deserialize, Serialize};

use super::population::Population;
use crate::error::{invalid, Error, Result};
use crate::ingest::AgentSummary;
use crate::model::{grooming_budget, ModelParams};
use crate::rng::derive_seed;
use crate::sim::{calibration_specs, run_simulation};
use crate::statfit::{
    budget_correlation, ccdf, fit_powerlaw, optimize_alpha, spec_targets, AlphaOptimum, AlphaSearch, Correlation,
    PowerLawFit,
};

/// Seed coordinate of the population re-run, kept apart from the
/// optimizer's replication seeds `0..reps`.
const POPULATION_RUN: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment1Config {
    pub a: f64,
    pub b: f64,
    pub horizon: u32,
    /// Calibration groomers, `M`.
    pub groomers: usize,
    pub search: AlphaSearch,
    pub master_seed: u64,
}

impl Experiment1Config {
    pub fn new(a: f64, b: f64, horizon: u32) -> Self {
        Self {
            a,
            b,
            horizon,
            groomers: 30,
            search: AlphaSearch::default(),
            master_seed: crate::rng::DEFAULT_SEED,
        }
    }
}

/// Simulated counterpart of one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedAgent {
    pub id: String,
    pub cost: f64,
    pub ties: u32,
    pub mean_strength: f64,
    pub sim_ties: f64,
    pub sim_mean_strength: f64,
}

impl SimulatedAgent {
    /// `(log N / log C, log m / log C)` for data and simulation, or `None`
    /// when `C <= 1`.
    pub fn normalized(&self) -> Option<((f64, f64), (f64, f64))> {
        let lc = self.cost.ln();
        (lc > 0.0).then(|| {
            (
                (f64::from(self.ties).ln() / lc, self.mean_strength.ln() / lc),
                (self.sim_ties.ln() / lc, self.sim_mean_strength.ln() / lc),
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment1Result {
    pub config: Experiment1Config,
    pub calibration_cost: f64,
    pub optimum: AlphaOptimum,
    pub population_seed: u64,
    pub agents: Vec<SimulatedAgent>,
    /// Agents left out because `C < N`.
    pub excluded: usize,
    pub sim_ccdf: Vec<(f64, f64)>,
    pub data_ccdf: Vec<(f64, f64)>,
    pub sim_powerlaw: Option<PowerLawFit>,
    pub data_powerlaw: Option<PowerLawFit>,
    /// Predicted daily budget against `(acts - N) / T`; absent without act
    /// counts or with fewer than three usable agents.
    pub budget: Option<Correlation>,
}

/// `data_strengths` are the observed dyad strengths (may be empty).
pub fn experiment1(
    cfg: &Experiment1Config,
    agents: &[AgentSummary],
    data_strengths: &[f64],
) -> Result<Experiment1Result> {
    if cfg.horizon == 0 {
        return Err(invalid("horizon", "data period must be >= 1 day"));
    }
    if cfg.groomers == 0 {
        return Err(invalid("groomers", "must be >= 1"));
    }
    let population = Population::from_agents(agents, cfg.b, cfg.horizon)?;
    let cost = population.calibration_cost();
    let base = ModelParams::new(cfg.a, 1.0, cfg.horizon)?.with_b(cfg.b)?;
    let specs = calibration_specs(cost, cfg.groomers, &base)?;
    let optimum = optimize_alpha(&spec_targets(&specs), &specs, &base, &cfg.search, cfg.master_seed)?;
    log::info!("alpha* = {} (e = {})", optimum.alpha, optimum.error);

    let params = ModelParams {
        alpha: optimum.alpha,
        ..base
    };
    let (pop_specs, index) = population.specs(cfg.a)?;
    let population_seed = derive_seed(cfg.master_seed, &[POPULATION_RUN]);
    let ledger = run_simulation(&pop_specs, &params, population_seed)?;
    let sim_agents: Vec<SimulatedAgent> = index
        .iter()
        .zip(ledger.realized())
        .map(|(&i, (n, m))| {
            let src = &agents[i];
            SimulatedAgent {
                id: src.id.clone(),
                cost: population.members[i].cost,
                ties: src.ties,
                mean_strength: src.mean_strength,
                sim_ties: n,
                sim_mean_strength: m,
            }
        })
        .collect();

    let strengths = ledger.pooled_strengths();
    let mut budget_pairs = (Vec::new(), Vec::new());
    for &i in &index {
        let src = &agents[i];
        let Some(acts) = src.acts else { continue };
        if src.mean_strength < 1.0 {
            continue;
        }
        let predicted = grooming_budget(&params, population.members[i].cost, src.mean_strength)?;
        let actual = (acts as f64 - f64::from(src.ties)) / f64::from(cfg.horizon);
        if predicted > 0.0 && actual > 0.0 {
            budget_pairs.0.push(predicted);
            budget_pairs.1.push(actual);
        }
    }
    let budget = match budget_correlation(&budget_pairs.0, &budget_pairs.1) {
        Ok(c) => Some(c),
        Err(Error::InsufficientData(_) | Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };

    Ok(Experiment1Result {
        config: cfg.clone(),
        calibration_cost: cost,
        optimum,
        population_seed,
        excluded: agents.len() - index.len(),
        agents: sim_agents,
        sim_ccdf: ccdf(&strengths),
        data_ccdf: ccdf(data_strengths),
        sim_powerlaw: fit_powerlaw(&strengths).ok(),
        data_powerlaw: fit_powerlaw(data_strengths).ok(),
        budget,
    })
}
