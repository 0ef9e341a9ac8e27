//! Social-grooming trade-off model `C = N m^a`: closed-form budget and cost
//! functions, a day-by-day individual-based simulator, the statistical
//! fitting layer, the two simulation experiments built on them, and
//! CSV/JSON/SVG result bundles.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod ingest;
pub mod model;
pub mod report;
pub mod rng;
pub mod sampling;
pub mod sim;
pub mod statfit;

pub use error::{Error, Result};
pub use model::{budget_peak, grooming_budget, grooming_cost, target_mean_strength, GroomerSpec, ModelParams};
pub use sim::{run_simulation, simulate_day, GroomerLedger, SimLedger};
