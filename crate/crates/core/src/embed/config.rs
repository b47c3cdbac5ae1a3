use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Skip-gram training parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub dim: usize,
    /// Largest context offset; each occurrence draws its radius from `1..=window`.
    pub window: usize,
    /// Noise samples per positive pair.
    pub negatives: usize,
    pub epochs: usize,
    pub lr_initial: f32,
    /// Frequent-token subsampling threshold; 0 disables subsampling.
    pub subsample_t: f64,
    pub min_count: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            dim: 300,
            window: 10,
            negatives: 5,
            epochs: 5,
            lr_initial: 0.025,
            subsample_t: 1e-5,
            min_count: 5,
            seed: 1,
            workers: 1,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidConfig(what.to_string()))
            }
        };
        check(self.dim >= 1, "dim must be at least 1")?;
        check(self.window >= 1, "window must be at least 1")?;
        check(self.negatives >= 1, "negatives must be at least 1")?;
        check(
            self.lr_initial > 0.0 && self.lr_initial.is_finite(),
            "learning rate must be positive",
        )?;
        check(self.min_count >= 1, "min_count must be at least 1")?;
        check(
            self.subsample_t >= 0.0 && self.subsample_t.is_finite(),
            "subsample threshold must be non-negative",
        )?;
        check(self.workers >= 1, "workers must be at least 1")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        TrainingConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        for bad in [
            TrainingConfig {
                dim: 0,
                ..Default::default()
            },
            TrainingConfig {
                window: 0,
                ..Default::default()
            },
            TrainingConfig {
                negatives: 0,
                ..Default::default()
            },
            TrainingConfig {
                lr_initial: 0.0,
                ..Default::default()
            },
            TrainingConfig {
                min_count: 0,
                ..Default::default()
            },
            TrainingConfig {
                workers: 0,
                ..Default::default()
            },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        }
    }
}
