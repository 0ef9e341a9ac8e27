//! Continuous power-law exponent by maximum likelihood with `x_min = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const MIN_SAMPLE: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub phi: f64,
    pub x_min: f64,
    pub n: usize,
    pub method: String,
}

/// `phi = 1 + n / sum(ln(d / x_min))`.
pub fn fit_powerlaw(strengths: &[f64]) -> Result<PowerLawFit> {
    let x_min = 1.0;
    let n = strengths.len();
    if n < MIN_SAMPLE {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs >= {MIN_SAMPLE} samples, got {n}"
        )));
    }
    let mut log_sum = 0.0;
    for &d in strengths {
        if !(d >= x_min) {
            return Err(invalid("d", format!("strength {d} below x_min = {x_min}")));
        }
        log_sum += (d / x_min).ln();
    }
    if !(log_sum > 0.0) || !log_sum.is_finite() {
        return Err(Error::Estimation(
            "every strength equals x_min; exponent is infinite".into(),
        ));
    }
    Ok(PowerLawFit {
        phi: 1.0 + n as f64 / log_sum,
        x_min,
        n,
        method: "continuous-mle".into(),
    })
}
