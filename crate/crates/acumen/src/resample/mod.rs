//! Resampling-based uncertainty quantification.
//!
//! Everything in this module is deterministic given a master seed. Each
//! logical stream of randomness (bootstrap resample i, power trial j, ...)
//! gets its own counter-derived substream, so results are identical across
//! thread counts and across runs.

mod agreement;
mod bootstrap;
mod ci;
mod permutation;
mod seeding;

pub use agreement::{
    acu_level_agreement_units, krippendorff_alpha, likert_agreement_units,
    summary_level_agreement_units, Scale,
};
pub use bootstrap::{paired_bootstrap_test, power_analysis, PowerResult};
pub use ci::{bootstrap_ci, IntervalResult};
pub use permutation::permutation_metric_test;
pub use seeding::{mix64, substream_rng, substream_seed, tag};

use serde::Serialize;
use thiserror::Error;

/// Failure modes shared by the resampling procedures.
#[derive(Debug, Error)]
pub enum ResampleError {
    /// Paired inputs must have the same length and at least two entries.
    #[error("paired inputs must have equal length >= 2, got {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    /// Matrices disagree on examples or systems.
    #[error("score matrices are not aligned: {0}")]
    ShapeMismatch(String),
    /// The observed statistic is undefined, so no test can be run.
    #[error("observed statistic is undefined (zero variance input)")]
    Degenerate,
    /// Not enough data to carry out the procedure.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// A configuration field is out of range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Knobs shared by the resampling procedures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResampleConfig {
    /// Master seed from which every substream is derived.
    pub seed: u64,
    /// Number of simulated experiments in a power analysis.
    pub trials: usize,
    /// Number of bootstrap or permutation resamples per test.
    pub resamples: usize,
    /// Significance threshold used when counting rejections.
    pub alpha_level: f64,
    /// Paired examples drawn per simulated experiment.
    pub sample_size: usize,
}

impl Default for ResampleConfig {
    fn default() -> Self {
        ResampleConfig {
            seed: 42,
            trials: 1000,
            resamples: 1000,
            alpha_level: 0.05,
            sample_size: 100,
        }
    }
}

impl ResampleConfig {
    /// Checks that the configuration describes a runnable procedure.
    pub fn validate(&self) -> Result<(), ResampleError> {
        if !(self.alpha_level > 0.0 && self.alpha_level < 1.0) {
            return Err(ResampleError::InvalidConfig(format!(
                "alpha_level must lie in (0, 1), got {}",
                self.alpha_level
            )));
        }
        if self.trials == 0 {
            return Err(ResampleError::InvalidConfig(
                "trials must be at least 1".into(),
            ));
        }
        if self.resamples == 0 {
            return Err(ResampleError::InvalidConfig(
                "resamples must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = ResampleConfig::default();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.trials, 1000);
        assert_eq!(cfg.resamples, 1000);
        assert!((cfg.alpha_level - 0.05).abs() < 1e-12);
        assert_eq!(cfg.sample_size, 100);
    }

    #[test]
    fn out_of_range_fields_are_rejected() {
        let bad_alpha = ResampleConfig {
            alpha_level: 0.0,
            ..ResampleConfig::default()
        };
        assert!(matches!(
            bad_alpha.validate(),
            Err(ResampleError::InvalidConfig(_))
        ));
        let bad_alpha_high = ResampleConfig {
            alpha_level: 1.0,
            ..ResampleConfig::default()
        };
        assert!(bad_alpha_high.validate().is_err());
        let nan_alpha = ResampleConfig {
            alpha_level: f64::NAN,
            ..ResampleConfig::default()
        };
        assert!(nan_alpha.validate().is_err());
        let no_trials = ResampleConfig {
            trials: 0,
            ..ResampleConfig::default()
        };
        assert!(no_trials.validate().is_err());
        let no_resamples = ResampleConfig {
            resamples: 0,
            ..ResampleConfig::default()
        };
        assert!(no_resamples.validate().is_err());
    }
}
