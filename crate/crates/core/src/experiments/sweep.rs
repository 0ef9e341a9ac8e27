//! Grid sweep over `(a, alpha)`: error per cell, lowest-error alpha selection
//! per `a`, population re-runs, threshold regression of `phi` on `a`, and
//! hierarchy-ratio regressions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::population::Population;
use crate::error::{invalid, Error, Result};
use crate::model::ModelParams;
use crate::rng::{cell_seed, DEFAULT_SEED};
use crate::sim::{calibration_specs, run_simulation};
use crate::statfit::{
    fit_powerlaw, hierarchy_profile, hierarchy_ratios, mean_sd, sim_error, slope_fit, spec_targets, threshold_fit,
    HierarchyMode, SlopeFit, ThresholdFit, DEFAULT_A_THRESHOLD,
};

/// Replication index reserved for the population re-run of a selected cell.
pub const RERUN_REP: u64 = u64::MAX;

/// Inclusive arithmetic grid `min, min + step, ..., max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let axis = Self { min, max, step };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(invalid("step", format!("grid step must be > 0, got {}", self.step)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.max >= self.min) {
            return Err(invalid("grid", format!("bad range [{}, {}]", self.min, self.max)));
        }
        Ok(())
    }

    /// Grid values rounded to 1e-9 so `0.5 + 6 * 0.05` prints as `0.8`.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| ((self.min + i as f64 * self.step) * 1e9).round() / 1e9)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub a_grid: GridAxis,
    pub alpha_grid: GridAxis,
    pub reps: u32,
    /// Calibration groomers per cell, `M`.
    pub groomers: usize,
    /// Lowest-error alphas kept per `a`.
    pub select: usize,
    /// Hierarchy levels `K`; ratios are reported for `k = 1..K-1`.
    pub levels: usize,
    pub a_threshold: f64,
    pub master_seed: u64,
}

impl SweepConfig {
    /// The full grid: 31 values of `a`, 101 of `alpha`, 50 replications.
    pub fn full_scale() -> Self {
        Self {
            a_grid: GridAxis {
                min: 0.5,
                max: 2.0,
                step: 0.05,
            },
            alpha_grid: GridAxis {
                min: 1.0,
                max: 3.0,
                step: 0.02,
            },
            reps: 50,
            groomers: 30,
            select: 20,
            levels: 11,
            a_threshold: DEFAULT_A_THRESHOLD,
            master_seed: DEFAULT_SEED,
        }
    }

    /// Desk-scale grid: `a` and `alpha` steps of 0.1, 5 replications.
    pub fn scaled() -> Self {
        Self {
            a_grid: GridAxis {
                min: 0.5,
                max: 2.0,
                step: 0.1,
            },
            alpha_grid: GridAxis {
                min: 1.0,
                max: 3.0,
                step: 0.1,
            },
            reps: 5,
            ..Self::full_scale()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.a_grid.validate()?;
        self.alpha_grid.validate()?;
        if self.a_grid.min <= 0.0 {
            return Err(invalid("a", "grid must stay above 0"));
        }
        if self.alpha_grid.min < 0.0 {
            return Err(invalid("alpha", "grid must stay at or above 0"));
        }
        if self.reps == 0 || self.groomers == 0 || self.select == 0 {
            return Err(invalid("reps/groomers/select", "must be >= 1"));
        }
        if self.levels < 2 {
            return Err(invalid("levels", "need K >= 2"));
        }
        Ok(())
    }
}

/// One replication of one `(a, alpha)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub a: f64,
    pub alpha: f64,
    pub rep: u64,
    pub seed: u64,
    pub e: f64,
    /// Power-law exponent of the cell's pooled strengths; NaN if not fittable.
    pub phi: f64,
    pub hierarchy: Vec<u64>,
    pub realized: Vec<(f64, f64)>,
}

/// A selected `(a, alpha)` pair re-run on the population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedRun {
    pub a: f64,
    pub alpha: f64,
    pub mean_e: f64,
    pub seed: u64,
    pub phi: f64,
    pub hierarchy: Vec<u64>,
    pub ratios: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ASummary {
    pub a: f64,
    pub alpha_mean: f64,
    pub alpha_sd: f64,
    pub phi_mean: f64,
    pub phi_sd: f64,
    pub selected: usize,
    /// Fewer than `select` alphas were available on the grid.
    pub short: bool,
    /// Mean `H_k / H_{k+1}` over selected runs where defined, `k = 1..K-1`.
    pub ratio_means: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSlope {
    pub k: usize,
    pub fit: Option<SlopeFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub horizon: u32,
    pub calibration_cost: f64,
    pub cells: Vec<SweepCell>,
    pub selected: Vec<SelectedRun>,
    pub summary: Vec<ASummary>,
    pub threshold: ThresholdFit,
    pub ratio_slopes: Vec<RatioSlope>,
}

fn run_cell(
    cfg: &SweepConfig,
    horizon: u32,
    cost: f64,
    (ai, a): (usize, f64),
    (bi, alpha): (usize, f64),
    rep: u64,
) -> Result<SweepCell> {
    let params = ModelParams::new(a, alpha, horizon)?;
    let specs = calibration_specs(cost, cfg.groomers, &params)?;
    let seed = cell_seed(cfg.master_seed, ai, bi, rep);
    let ledger = run_simulation(&specs, &params, seed)?;
    let realized = ledger.realized();
    let e = sim_error(&spec_targets(&specs), &realized)?;
    let strengths = ledger.pooled_strengths();
    let phi = fit_powerlaw(&strengths).map_or(f64::NAN, |f| f.phi);
    let hierarchy = hierarchy_profile(&strengths, HierarchyMode::Sim, cfg.levels)?.sizes;
    Ok(SweepCell {
        a,
        alpha,
        rep,
        seed,
        e,
        phi,
        hierarchy,
        realized,
    })
}

/// Recomputes one cell in isolation; identical to the record from a full sweep.
pub fn recompute_cell(
    cfg: &SweepConfig,
    population: &Population,
    a_index: usize,
    alpha_index: usize,
    rep: u64,
) -> Result<SweepCell> {
    let a = cfg.a_grid.values()[a_index];
    let alpha = cfg.alpha_grid.values()[alpha_index];
    run_cell(
        cfg,
        population.horizon,
        population.calibration_cost(),
        (a_index, a),
        (alpha_index, alpha),
        rep,
    )
}

/// Indices of the lowest mean-error alphas for one `a`, ordered by
/// `(mean e, alpha)`.
pub fn select_lowest(mean_errors: &[(f64, f64)], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..mean_errors.len())
        .filter(|&i| mean_errors[i].1.is_finite())
        .collect();
    order.sort_by(|&x, &y| {
        mean_errors[x]
            .1
            .total_cmp(&mean_errors[y].1)
            .then(mean_errors[x].0.total_cmp(&mean_errors[y].0))
    });
    order.truncate(count);
    order
}

pub fn experiment2(cfg: &SweepConfig, population: &Population) -> Result<SweepResult> {
    cfg.validate()?;
    let horizon = population.horizon;
    let cost = population.calibration_cost();
    let a_values = cfg.a_grid.values();
    let alpha_values = cfg.alpha_grid.values();
    let reps = u64::from(cfg.reps);
    let n_alpha = alpha_values.len();

    let coords: Vec<(usize, usize, u64)> = (0..a_values.len())
        .flat_map(|ai| (0..n_alpha).flat_map(move |bi| (0..reps).map(move |r| (ai, bi, r))))
        .collect();
    log::info!("sweep: {} cells", coords.len());
    let cells = coords
        .par_iter()
        .map(|&(ai, bi, r)| run_cell(cfg, horizon, cost, (ai, a_values[ai]), (bi, alpha_values[bi]), r))
        .collect::<Result<Vec<_>>>()?;

    // Lowest-error alphas per a, by mean e over replications.
    let mut picks: Vec<(usize, usize, f64)> = Vec::new();
    let mut short = vec![false; a_values.len()];
    for ai in 0..a_values.len() {
        let base = ai * n_alpha * reps as usize;
        let mean_errors: Vec<(f64, f64)> = (0..n_alpha)
            .map(|bi| {
                let start = base + bi * reps as usize;
                let slice = &cells[start..start + reps as usize];
                let e = slice.iter().map(|c| c.e).sum::<f64>() / reps as f64;
                (alpha_values[bi], e)
            })
            .collect();
        let chosen = select_lowest(&mean_errors, cfg.select);
        if chosen.is_empty() {
            return Err(Error::Estimation(format!("no finite error at a = {}", a_values[ai])));
        }
        short[ai] = chosen.len() < cfg.select;
        picks.extend(chosen.into_iter().map(|bi| (ai, bi, mean_errors[bi].1)));
    }

    let specs_by_a = a_values
        .iter()
        .map(|&a| population.specs(a).map(|(s, _)| s))
        .collect::<Result<Vec<_>>>()?;
    let selected = picks
        .par_iter()
        .map(|&(ai, bi, mean_e)| {
            let a = a_values[ai];
            let alpha = alpha_values[bi];
            let params = ModelParams::new(a, alpha, horizon)?;
            let seed = cell_seed(cfg.master_seed, ai, bi, RERUN_REP);
            let ledger = run_simulation(&specs_by_a[ai], &params, seed)?;
            let strengths = ledger.pooled_strengths();
            let phi = fit_powerlaw(&strengths)?.phi;
            let profile = hierarchy_profile(&strengths, HierarchyMode::Sim, cfg.levels)?;
            Ok(SelectedRun {
                a,
                alpha,
                mean_e,
                seed,
                phi,
                ratios: hierarchy_ratios(&profile),
                hierarchy: profile.sizes,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let summary = summarize(&a_values, &selected, &short, cfg.levels);
    let points: Vec<(f64, f64)> = selected.iter().map(|s| (s.a, s.phi)).collect();
    let threshold = threshold_fit(&points, cfg.a_threshold)?;
    let ratio_slopes = ratio_slopes(&selected, cfg.levels);

    Ok(SweepResult {
        config: cfg.clone(),
        horizon,
        calibration_cost: cost,
        cells,
        selected,
        summary,
        threshold,
        ratio_slopes,
    })
}

fn summarize(a_values: &[f64], selected: &[SelectedRun], short: &[bool], levels: usize) -> Vec<ASummary> {
    a_values
        .iter()
        .zip(short)
        .map(|(&a, &short)| {
            let runs: Vec<&SelectedRun> = selected.iter().filter(|s| s.a == a).collect();
            let alphas: Vec<f64> = runs.iter().map(|s| s.alpha).collect();
            let phis: Vec<f64> = runs.iter().map(|s| s.phi).collect();
            let (alpha_mean, alpha_sd) = mean_sd(&alphas);
            let (phi_mean, phi_sd) = mean_sd(&phis);
            let ratio_means = (0..levels - 1)
                .map(|k| {
                    let vals: Vec<f64> = runs.iter().filter_map(|s| s.ratios[k]).collect();
                    (!vals.is_empty()).then(|| mean_sd(&vals).0)
                })
                .collect();
            ASummary {
                a,
                alpha_mean,
                alpha_sd,
                phi_mean,
                phi_sd,
                selected: runs.len(),
                short,
                ratio_means,
            }
        })
        .collect()
}

/// `H_k / H_{k+1} ~ beta1 a + beta0` for each `k`, undefined ratios dropped.
fn ratio_slopes(selected: &[SelectedRun], levels: usize) -> Vec<RatioSlope> {
    (0..levels - 1)
        .map(|k| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = selected.iter().filter_map(|s| s.ratios[k].map(|r| (s.a, r))).unzip();
            RatioSlope {
                k: k + 1,
                fit: slope_fit(&xs, &ys).ok(),
            }
        })
        .collect()
}
