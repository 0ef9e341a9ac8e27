//! Calibration of `alpha` by matching simulated `(N', m')` to targets.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{GroomerSpec, ModelParams};
use crate::rng::derive_seed;
use crate::sim::run_simulation;

/// Mean squared log deviation over both coordinates:
/// `sum_i [(log N_i - log N'_i)^2 + (log m_i - log m'_i)^2] / M`.
pub fn sim_error(targets: &[(f64, f64)], realized: &[(f64, f64)]) -> Result<f64> {
    sim_error_in_base(targets, realized, std::f64::consts::E)
}

pub fn sim_error_in_base(targets: &[(f64, f64)], realized: &[(f64, f64)], base: f64) -> Result<f64> {
    if targets.len() != realized.len() {
        return Err(invalid(
            "realized",
            format!("{} targets but {} realized", targets.len(), realized.len()),
        ));
    }
    if targets.is_empty() {
        return Err(Error::InsufficientData("no groomers to compare".into()));
    }
    if !(base > 0.0 && base != 1.0) {
        return Err(invalid("base", format!("invalid log base {base}")));
    }
    let scale = base.ln();
    let mut total = 0.0;
    for (&(n, m), &(n2, m2)) in targets.iter().zip(realized) {
        if [n, m, n2, m2].iter().any(|v| !(*v > 0.0)) {
            return Err(invalid("entries", "N and m must be positive"));
        }
        total += ((n / n2).ln() / scale).powi(2) + ((m / m2).ln() / scale).powi(2);
    }
    Ok(total / targets.len() as f64)
}

/// Grid-refinement search settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSearch {
    pub lo: f64,
    pub hi: f64,
    /// Step of the first pass; each later pass halves it around the best point.
    pub initial_step: f64,
    pub passes: u32,
    /// Replications averaged per candidate. Replication `r` always uses seed
    /// `derive_seed(master, [r])`, whatever the candidate.
    pub reps: u32,
    pub log_base: f64,
}

impl Default for AlphaSearch {
    fn default() -> Self {
        Self {
            lo: 1.0 / 16.0,
            hi: 8.0,
            initial_step: 1.0 / 8.0,
            passes: 3,
            reps: 5,
            log_base: std::f64::consts::E,
        }
    }
}

impl AlphaSearch {
    fn validate(&self) -> Result<()> {
        if !(self.lo >= 0.0 && self.hi > self.lo) {
            return Err(invalid("alpha range", format!("[{}, {}]", self.lo, self.hi)));
        }
        if !(self.initial_step > 0.0) {
            return Err(invalid("initial_step", "must be > 0"));
        }
        if self.passes == 0 || self.reps == 0 {
            return Err(invalid("passes/reps", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaOptimum {
    pub alpha: f64,
    pub error: f64,
    /// The objective did not vary over the first-pass grid.
    pub flat: bool,
    /// Every `(alpha, mean e)` evaluated, sorted by alpha.
    pub evaluations: Vec<(f64, f64)>,
}

/// Target `(N_i, m_i)` pairs implied by groomer specs.
pub fn spec_targets(specs: &[GroomerSpec]) -> Vec<(f64, f64)> {
    specs
        .iter()
        .map(|s| (f64::from(s.target_ties), s.target_mean))
        .collect()
}

/// Mean error over `reps` replications at one `alpha`.
pub fn mean_sim_error(
    targets: &[(f64, f64)],
    specs: &[GroomerSpec],
    params: &ModelParams,
    alpha: f64,
    reps: u32,
    log_base: f64,
    master_seed: u64,
) -> Result<f64> {
    let params = ModelParams { alpha, ..*params };
    let mut total = 0.0;
    for r in 0..reps {
        let ledger = run_simulation(specs, &params, derive_seed(master_seed, &[u64::from(r)]))?;
        total += sim_error_in_base(targets, &ledger.realized(), log_base)?;
    }
    Ok(total / f64::from(reps))
}

fn key(alpha: f64) -> u64 {
    // Grid points are dyadic in practice; rounding guards against drift.
    (alpha * 2f64.powi(30)).round() as u64
}

/// Finds the `alpha` minimizing the mean simulation error against `targets`.
pub fn optimize_alpha(
    targets: &[(f64, f64)],
    specs: &[GroomerSpec],
    params: &ModelParams,
    search: &AlphaSearch,
    master_seed: u64,
) -> Result<AlphaOptimum> {
    search.validate()?;
    if targets.len() != specs.len() {
        return Err(invalid("targets", "one target per groomer spec required"));
    }
    let mut seen: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    let evaluate = |candidates: Vec<f64>, seen: &mut BTreeMap<u64, (f64, f64)>| -> Result<()> {
        let fresh: Vec<f64> = candidates
            .into_iter()
            .filter(|c| !seen.contains_key(&key(*c)))
            .collect();
        let errors = fresh
            .par_iter()
            .map(|&alpha| mean_sim_error(targets, specs, params, alpha, search.reps, search.log_base, master_seed))
            .collect::<Result<Vec<f64>>>()?;
        for (alpha, e) in fresh.into_iter().zip(errors) {
            seen.insert(key(alpha), (alpha, e));
        }
        Ok(())
    };
    let best = |seen: &BTreeMap<u64, (f64, f64)>| {
        seen.values()
            .filter(|(_, e)| e.is_finite())
            .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.total_cmp(&y.0)))
            .copied()
    };

    let steps = ((search.hi - search.lo) / search.initial_step + 1e-9).floor() as usize;
    let mut first: Vec<f64> = (0..=steps)
        .map(|i| search.lo + i as f64 * search.initial_step)
        .collect();
    if first.last().is_some_and(|&x| x < search.hi - 1e-12) {
        first.push(search.hi);
    }
    evaluate(first, &mut seen)?;

    let finite: Vec<f64> = seen.values().map(|v| v.1).filter(|e| e.is_finite()).collect();
    if finite.is_empty() {
        return Err(Error::Optimization("error is non-finite at every candidate".into()));
    }
    let (lo_e, hi_e) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &e| (l.min(e), h.max(e)));
    let flat = hi_e - lo_e <= 1e-12 * lo_e.abs().max(1.0);

    if !flat {
        let mut step = search.initial_step;
        for _ in 1..search.passes {
            let (centre, _) = best(&seen).expect("finite candidate exists");
            let half = step / 2.0;
            let around: Vec<f64> = (-2..=2)
                .map(|i| centre + f64::from(i) * half)
                .filter(|&x| x >= search.lo - 1e-12 && x <= search.hi + 1e-12)
                .collect();
            evaluate(around, &mut seen)?;
            step = half;
        }
    }

    let (alpha, error) = best(&seen).expect("finite candidate exists");
    if flat {
        log::warn!("alpha objective is flat over [{}, {}]", search.lo, search.hi);
    }
    Ok(AlphaOptimum {
        alpha,
        error,
        flat,
        evaluations: seen.into_values().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::calibration_specs;

    #[test]
    fn error_examples() {
        let t = vec![(10.0, 3.0), (2.0, 5.0)];
        assert_eq!(sim_error(&t, &t).unwrap(), 0.0);
        let e = sim_error(&[(4.0, 2.0)], &[(40.0, 2.0)]).unwrap();
        assert!((e - 10f64.ln().powi(2)).abs() < 1e-12);
        assert!((e - 5.3019).abs() < 1e-4);
    }

    #[test]
    fn error_rejects_bad_entries() {
        assert!(sim_error(&[(0.0, 1.0)], &[(1.0, 1.0)]).is_err());
        assert!(sim_error(&[(1.0, 1.0)], &[(1.0, -1.0)]).is_err());
        assert!(sim_error(&[(1.0, 1.0)], &[]).is_err());
    }

    #[test]
    fn error_base_only_rescales() {
        let t = vec![(10.0, 3.0), (2.0, 5.0), (7.0, 1.5)];
        let r = vec![(8.0, 2.0), (3.0, 4.0), (7.0, 1.0)];
        let ln = sim_error(&t, &r).unwrap();
        let l10 = sim_error_in_base(&t, &r, 10.0).unwrap();
        assert!((ln / l10 - 10f64.ln().powi(2)).abs() < 1e-9);
    }

    #[test]
    fn flat_objective_reported() {
        // C = N for every groomer: zero budget whatever alpha is.
        let params = ModelParams::new(1.2, 1.0, 30).unwrap();
        let specs: Vec<GroomerSpec> = (1..=6)
            .map(|n| GroomerSpec::new(n as usize, n as f64, n, 1.2).unwrap())
            .collect();
        let targets = spec_targets(&specs);
        let search = AlphaSearch {
            initial_step: 1.0,
            reps: 2,
            ..AlphaSearch::default()
        };
        let opt = optimize_alpha(&targets, &specs, &params, &search, 1).unwrap();
        assert!(opt.flat);
    }

    #[test]
    fn argmin_invariant_to_log_base() {
        let params = ModelParams::new(1.2, 1.0, 40).unwrap();
        let specs = calibration_specs(60.0, 8, &params).unwrap();
        let targets = spec_targets(&specs);
        let search = AlphaSearch {
            initial_step: 0.5,
            reps: 2,
            ..AlphaSearch::default()
        };
        let natural = optimize_alpha(&targets, &specs, &params, &search, 3).unwrap();
        let decimal = optimize_alpha(
            &targets,
            &specs,
            &params,
            &AlphaSearch {
                log_base: 10.0,
                ..search.clone()
            },
            3,
        )
        .unwrap();
        assert_eq!(natural.alpha, decimal.alpha);
    }

    #[test]
    fn bad_search_rejected() {
        let params = ModelParams::new(1.2, 1.0, 10).unwrap();
        let specs = calibration_specs(20.0, 3, &params).unwrap();
        let targets = spec_targets(&specs);
        let search = AlphaSearch {
            initial_step: 0.0,
            ..AlphaSearch::default()
        };
        assert!(optimize_alpha(&targets, &specs, &params, &search, 0).is_err());
    }
}
