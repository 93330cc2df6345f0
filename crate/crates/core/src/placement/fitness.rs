//! Service-to-feature-partition fitness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Application, Device, Service};
use crate::partition::FeatureTriplet;

/// Per-dimension `(min, max)` used to scale triplets into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationRanges {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl NormalizationRanges {
    /// Ranges over every device resource value and every service demand of
    /// the scenario.
    pub fn from_scenario(devices: &[Device], apps: &[Application]) -> Self {
        let mut min = [f64::INFINITY; 3];
        let mut max = [f64::NEG_INFINITY; 3];
        let mut see = |dim: usize, v: f64| {
            min[dim] = min[dim].min(v);
            max[dim] = max[dim].max(v);
        };
        for d in devices {
            for dim in 0..3 {
                see(dim, d.resource(dim));
            }
        }
        for s in apps.iter().flat_map(|a| &a.services) {
            for dim in 0..3 {
                see(dim, s.demand(dim));
            }
        }
        for dim in 0..3 {
            if !min[dim].is_finite() {
                min[dim] = 0.0;
                max[dim] = 0.0;
            }
        }
        Self { min, max }
    }

    fn scale(&self, dim: usize, v: f64) -> Option<f64> {
        let span = self.max[dim] - self.min[dim];
        (span > 0.0).then(|| ((v - self.min[dim]) / span).clamp(0.0, 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessConfig {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for FitnessConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 0.5,
        }
    }
}

impl FitnessConfig {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let cfg = Self { alpha, beta };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha.is_finite()
            && self.beta.is_finite()
            && self.alpha >= 0.0
            && self.beta >= 0.0
            && self.alpha + self.beta > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidFitness(format!(
                "alpha = {}, beta = {}: both must be non-negative with a positive sum",
                self.alpha, self.beta
            )))
        }
    }
}

/// `1 - d / sqrt(3)` where `d` is the euclidean distance between the scaled
/// feature and the scaled demand. Dimensions without spread are skipped.
pub fn demand_similarity(f: &FeatureTriplet, s: &Service, ranges: &NormalizationRanges) -> f64 {
    let mut sq = 0.0;
    for dim in 0..3 {
        if let (Some(a), Some(b)) = (
            ranges.scale(dim, f.get(dim)),
            ranges.scale(dim, s.demand(dim)),
        ) {
            sq += (a - b) * (a - b);
        }
    }
    (1.0 - sq.sqrt() / 3f64.sqrt()).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fitness {
    pub value: f64,
    /// No device of the partition is reachable from the user; `value` holds
    /// the similarity term only.
    pub unreachable: bool,
}

/// `alpha * max_sim + beta / (1 + min_t)`; `min_t` is `None` when no device
/// is reachable.
pub fn fitness(max_sim: f64, min_t: Option<f64>, cfg: &FitnessConfig) -> Fitness {
    match min_t {
        Some(t) => Fitness {
            value: cfg.alpha * max_sim + cfg.beta / (1.0 + t),
            unreachable: false,
        },
        None => Fitness {
            value: cfg.alpha * max_sim,
            unreachable: true,
        },
    }
}
