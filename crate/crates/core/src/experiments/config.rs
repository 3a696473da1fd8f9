//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::allocators::Mode;
use crate::channel::{sample_ensemble, FadingEnsemble, NoiseModel, DEFAULT_RAYLEIGH_SCALE};
use crate::dual::Tolerances;
use crate::error::{Error, Result};

/// Budget or noise axis: an explicit list or an inclusive range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Grid {
    /// Grid values in order. Range points are `start + i step`, rounded to
    /// 12 decimals so that printed values stay short.
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            Grid::List(v) => v.clone(),
            Grid::Range { start, stop, step } => {
                if !(step.is_finite() && *step > 0.0 && stop >= start) {
                    return Err(Error::Config(format!("bad range {start}..{stop} step {step}")));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect()
            }
        };
        if v.is_empty() {
            return Err(Error::Config("grid is empty".into()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("grid values must be finite".into()));
        }
        Ok(v)
    }
}

impl From<Vec<f64>> for Grid {
    fn from(v: Vec<f64>) -> Self {
        Grid::List(v)
    }
}

/// Noise given as relay variance and total destination variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub n1: f64,
    pub n_total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub seed: u64,
    pub size: usize,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_scale() -> f64 {
    DEFAULT_RAYLEIGH_SCALE
}

fn default_workers() -> usize {
    1
}

fn default_rhos() -> Vec<f64> {
    vec![0.3, 0.5]
}

fn default_boundary_step() -> f64 {
    0.05
}

/// One experiment. Unknown keys are rejected.
///
/// ```json
/// {
///   "mode": {"kind": "theorem2", "rho": 0.4472135954999579},
///   "noise": {"n1": 1.0, "n_total": 9.0},
///   "p1_bar": {"start": 0.1, "stop": 10.0, "step": 0.1},
///   "p2_bar": [0.1, 0.5, 1.0],
///   "ensemble": {"seed": 1, "size": 200}
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub noise: NoiseSpec,
    pub p1_bar: Grid,
    pub p2_bar: Grid,
    pub ensemble: EnsembleSpec,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// destination noise axis of the correlation comparison
    #[serde(default)]
    pub n_total_grid: Option<Grid>,
    /// fixed correlations of the comparison
    #[serde(default = "default_rhos")]
    pub compare_rhos: Vec<f64>,
    /// relay-budget increment of the boundary scan
    #[serde(default = "default_boundary_step")]
    pub boundary_step: f64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| Error::Config(e.to_string());
        self.mode.validate().map_err(cfg_err)?;
        self.noise_model().map_err(cfg_err)?;
        for v in self.p1_bar.values()? {
            if !(v > 0.0) {
                return Err(Error::Config(format!("source budgets must be > 0, got {v}")));
            }
        }
        for v in self.p2_bar.values()? {
            if !(v >= 0.0) {
                return Err(Error::Config(format!("relay budgets must be >= 0, got {v}")));
            }
        }
        if self.ensemble.size == 0 {
            return Err(Error::Config("ensemble size must be >= 1".into()));
        }
        if !(self.ensemble.scale > 0.0) {
            return Err(Error::Config("ensemble scale must be > 0".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        if !(self.boundary_step > 0.0) {
            return Err(Error::Config("boundary_step must be > 0".into()));
        }
        if let Some(g) = &self.n_total_grid {
            for v in g.values()? {
                NoiseModel::from_total(self.noise.n1, v).map_err(cfg_err)?;
            }
        }
        for &rho in &self.compare_rhos {
            crate::rates::check_rho(rho).map_err(cfg_err)?;
        }
        Ok(())
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        NoiseModel::from_total(self.noise.n1, self.noise.n_total)
    }

    pub fn build_ensemble(&self) -> Result<FadingEnsemble> {
        sample_ensemble(self.ensemble.seed, self.ensemble.size, self.ensemble.scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "mode": {"kind": "theorem1"},
        "noise": {"n1": 1.0, "n_total": 1.6},
        "p1_bar": {"start": 0.1, "stop": 0.5, "step": 0.1},
        "p2_bar": [1.0],
        "ensemble": {"seed": 3, "size": 10}
    }"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.p1_bar.values().unwrap(), vec![0.1, 0.2, 0.3, 0.4, 0.5]);
        assert_eq!(cfg.workers, 1);
        assert_eq!(cfg.compare_rhos, vec![0.3, 0.5]);
        assert_eq!(cfg.ensemble.scale, 0.25);
        let again = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        let extra = MINIMAL.replacen("{", "{\"colour\": 1,", 1);
        assert!(matches!(ExperimentConfig::from_json(&extra), Err(Error::Config(_))));
        let bad_noise = MINIMAL.replace("\"n_total\": 1.6", "\"n_total\": 0.5");
        assert!(matches!(ExperimentConfig::from_json(&bad_noise), Err(Error::Config(_))));
        let empty = MINIMAL.replace("[1.0]", "[]");
        assert!(ExperimentConfig::from_json(&empty).is_err());
    }
}
