//! Day-by-day individual-based simulator.
//!
//! Each groomer starts with one tie of strength 1. On every day `t` in
//! `1..=T` it first opens `Poisson((N_target - 1) / T)` new ties of strength
//! 1 at no cost, then spends its daily budget reinforcing partners drawn in
//! proportion to tie strength, each partner at most once per day.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{grooming_budget, GroomerSpec, ModelParams};
use crate::rng::{creation_stream, selection_stream};
use crate::sampling::{poisson_inversion, PartnerSampler};

/// Tie strengths held by one groomer. Groomees are local to the groomer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroomerLedger {
    pub strengths: Vec<f64>,
}

impl Default for GroomerLedger {
    fn default() -> Self {
        Self::new()
    }
}

impl GroomerLedger {
    /// The initial state: a single tie of strength 1.
    pub fn new() -> Self {
        Self { strengths: vec![1.0] }
    }

    pub fn tie_count(&self) -> usize {
        self.strengths.len()
    }

    pub fn mean_strength(&self) -> f64 {
        if self.strengths.is_empty() {
            return 0.0;
        }
        self.strengths.iter().sum::<f64>() / self.strengths.len() as f64
    }

    /// Realized `(N', m')`.
    pub fn realized(&self) -> (f64, f64) {
        (self.tie_count() as f64, self.mean_strength())
    }
}

/// All groomers' ledgers at the end of (or during) a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimLedger {
    pub groomers: Vec<GroomerLedger>,
    pub day: u32,
}

impl SimLedger {
    pub fn realized(&self) -> Vec<(f64, f64)> {
        self.groomers.iter().map(GroomerLedger::realized).collect()
    }

    /// Every tie strength of every groomer, in groomer order.
    pub fn pooled_strengths(&self) -> Vec<f64> {
        self.groomers.iter().flat_map(|g| g.strengths.iter().copied()).collect()
    }
}

/// What happened on one simulated day, for budget accounting.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DayOutcome {
    pub created: u32,
    pub reinforced: u32,
    pub spent: f64,
    pub leftover: f64,
}

/// Reusable state for stepping one groomer through its days.
#[derive(Debug)]
pub struct GroomerStepper<'a, R: Rng> {
    spec: &'a GroomerSpec,
    params: &'a ModelParams,
    budget: f64,
    creation_rate: f64,
    creation_rng: R,
    selection_rng: R,
    sampler: PartnerSampler,
}

impl<'a, R: Rng> GroomerStepper<'a, R> {
    pub fn new(spec: &'a GroomerSpec, params: &'a ModelParams, creation_rng: R, selection_rng: R) -> Result<Self> {
        params.validate()?;
        if spec.target_ties < 1 {
            return Err(invalid("N_target", "must be >= 1"));
        }
        if params.horizon == 0 {
            return Err(invalid("horizon", "cannot step a zero-day horizon"));
        }
        let budget = grooming_budget(params, spec.cost, spec.target_mean)?;
        let creation_rate = f64::from(spec.target_ties - 1) / f64::from(params.horizon);
        Ok(Self {
            spec,
            params,
            budget,
            creation_rate,
            creation_rng,
            selection_rng,
            sampler: PartnerSampler::new(),
        })
    }

    pub fn daily_budget(&self) -> f64 {
        self.budget
    }

    pub fn spec(&self) -> &GroomerSpec {
        self.spec
    }

    /// Advances `ledger` through day `day` (1-based).
    pub fn step(&mut self, ledger: &mut GroomerLedger, day: u32) -> Result<DayOutcome> {
        if day < 1 || day > self.params.horizon {
            return Err(invalid("t", format!("day {day} outside 1..={}", self.params.horizon)));
        }
        let created = poisson_inversion(&mut self.creation_rng, self.creation_rate);
        ledger.strengths.extend(std::iter::repeat_n(1.0, created as usize));

        let mut outcome = DayOutcome {
            created,
            ..DayOutcome::default()
        };
        let mut remaining = self.budget;
        if remaining <= 0.0 {
            return Ok(outcome);
        }

        let elapsed = f64::from(day);
        let alpha = self.params.alpha;
        self.sampler.reset(&ledger.strengths);
        while remaining > 0.0 {
            let Some(j) = self.sampler.draw(&mut self.selection_rng) else {
                break;
            };
            let d = ledger.strengths[j];
            let price = alpha * (d / elapsed) + 1.0;
            outcome.reinforced += 1;
            if remaining >= price {
                ledger.strengths[j] = d + 1.0;
                remaining -= price;
                outcome.spent += price;
            } else {
                ledger.strengths[j] = d + remaining / price;
                outcome.spent += remaining;
                remaining = 0.0;
            }
        }
        outcome.leftover = remaining;
        Ok(outcome)
    }
}

/// One day for one groomer with caller-supplied streams.
///
/// Builds a fresh stepper each call; [`run_groomer`] keeps one across days.
pub fn simulate_day<R: Rng>(
    ledger: &mut GroomerLedger,
    spec: &GroomerSpec,
    params: &ModelParams,
    day: u32,
    creation_rng: &mut R,
    selection_rng: &mut R,
) -> Result<DayOutcome> {
    let mut stepper = GroomerStepper::new(spec, params, &mut *creation_rng, &mut *selection_rng)?;
    stepper.step(ledger, day)
}

/// Runs one groomer over the full horizon from the initial state.
pub fn run_groomer(spec: &GroomerSpec, params: &ModelParams, seed: u64) -> Result<GroomerLedger> {
    let mut ledger = GroomerLedger::new();
    if params.horizon == 0 {
        params.validate()?;
        return Ok(ledger);
    }
    let mut stepper = GroomerStepper::new(
        spec,
        params,
        creation_stream(seed, spec.id),
        selection_stream(seed, spec.id),
    )?;
    for day in 1..=params.horizon {
        stepper.step(&mut ledger, day)?;
    }
    Ok(ledger)
}

/// Runs every groomer for `T` days. Groomer `i` uses streams keyed by
/// `(seed, spec.id)`, so the output does not depend on thread count.
pub fn run_simulation(specs: &[GroomerSpec], params: &ModelParams, seed: u64) -> Result<SimLedger> {
    if specs.is_empty() {
        return Err(invalid("specs", "need at least one groomer"));
    }
    let groomers = specs
        .iter()
        .map(|spec| run_groomer(spec, params, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimLedger {
        groomers,
        day: params.horizon,
    })
}

/// [`run_simulation`] with groomers spread over the rayon pool.
pub fn run_simulation_par(specs: &[GroomerSpec], params: &ModelParams, seed: u64) -> Result<SimLedger> {
    if specs.is_empty() {
        return Err(invalid("specs", "need at least one groomer"));
    }
    let groomers = specs
        .par_iter()
        .map(|spec| run_groomer(spec, params, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimLedger {
        groomers,
        day: params.horizon,
    })
}

/// `M` integer tie targets equally spaced in log scale over `[1, max]`.
pub fn log_spaced_ties(count: usize, max: u32) -> Vec<u32> {
    let max = max.max(1);
    match count {
        0 => Vec::new(),
        1 => vec![1],
        _ => {
            let top = f64::from(max).ln();
            (0..count)
                .map(|i| {
                    let x = (top * i as f64 / (count - 1) as f64).exp().round();
                    (x as u32).clamp(1, max)
                })
                .collect()
        }
    }
}

/// Groomers sharing one cost `C`, with log-spaced tie targets on
/// `[1, min(T, C)]` so every target mean strength is at least one day.
pub fn calibration_specs(cost: f64, groomers: usize, params: &ModelParams) -> Result<Vec<GroomerSpec>> {
    let top = f64::from(params.horizon).min(cost.floor()).max(1.0) as u32;
    log_spaced_ties(groomers, top)
        .into_iter()
        .enumerate()
        .map(|(i, n)| GroomerSpec::new(i, cost, n, params.a))
        .collect()
}
