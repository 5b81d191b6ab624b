//! Channel-transmission fading models.
//!
//! A free-space link's transmission wanders over time (beam wandering,
//! scintillation); the harness draws one transmission per signature element
//! from a configured distribution and the analysis bins records by the value
//! that was actually measured.

use rand::{Rng, RngCore};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum FadingModel {
    /// A fixed transmission.
    Constant(f64),
    /// Uniform over [lo, hi].
    Uniform { lo: f64, hi: f64 },
    /// A weighted histogram of (bin center, weight) points.
    Empirical(Vec<(f64, f64)>),
}

impl FadingModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Validation(msg));
        match self {
            FadingModel::Constant(t) => {
                if !(*t > 0.0 && *t <= 1.0) {
                    return bad(format!("constant transmission {t} must lie in (0, 1]"));
                }
            }
            FadingModel::Uniform { lo, hi } => {
                if !(*lo > 0.0 && *hi <= 1.0 && lo < hi) {
                    return bad(format!(
                        "uniform fading range [{lo}, {hi}] must satisfy 0 < lo < hi <= 1"
                    ));
                }
            }
            FadingModel::Empirical(bins) => {
                if bins.is_empty() {
                    return bad("empirical fading needs at least one bin".into());
                }
                let mut total = 0.0;
                for &(center, weight) in bins {
                    if !(center > 0.0 && center <= 1.0) {
                        return bad(format!("empirical bin center {center} outside (0, 1]"));
                    }
                    if !(weight >= 0.0) {
                        return bad(format!("empirical bin weight {weight} must be >= 0"));
                    }
                    total += weight;
                }
                if (total - 1.0).abs() > 1e-9 {
                    return bad(format!("empirical weights sum to {total}, expected 1"));
                }
            }
        }
        Ok(())
    }

    /// Draw one transmission (exactly one uniform consumed except for
    /// `Constant`, which consumes none).
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FadingModel::Constant(t) => *t,
            FadingModel::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            FadingModel::Empirical(bins) => {
                let u = rng.random::<f64>();
                let mut acc = 0.0;
                for &(center, weight) in bins {
                    acc += weight;
                    if u < acc {
                        return center;
                    }
                }
                bins.last().expect("validated non-empty").0
            }
        }
    }
}
