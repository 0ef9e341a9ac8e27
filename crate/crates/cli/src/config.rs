//! Optional TOML run configuration. Keys mirror the long flag names with
//! dashes replaced by underscores; any flag given on the command line wins.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,

    pub a: Option<f64>,
    pub b: Option<f64>,
    pub alpha: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: Option<u32>,
    #[serde(rename = "C")]
    pub cost: Option<f64>,
    #[serde(rename = "M")]
    pub groomers: Option<usize>,

    pub a_min: Option<f64>,
    pub a_max: Option<f64>,
    pub a_step: Option<f64>,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub alpha_step: Option<f64>,
    pub reps: Option<u32>,
    pub select: Option<usize>,
    pub levels: Option<usize>,
    pub passes: Option<u32>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_keys() {
        let cfg: FileConfig = toml::from_str("seed = 9\nT = 100\nalpha_step = 0.1\nM = 12\n").unwrap();
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.horizon, Some(100));
        assert_eq!(cfg.alpha_step, Some(0.1));
        assert_eq!(cfg.groomers, Some(12));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("sede = 1\n").is_err());
    }
}
