//! Transmission binning: sort records into equal-width sub-channels.

use crate::error::{CliError, Result};

/// Equal-width binning of measured transmissions over [t_lo, t_hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binning {
    pub n_bins: usize,
    pub t_lo: f64,
    pub t_hi: f64,
}

/// The experiment sorts data into 32 sub-channels over the full range.
pub const DEFAULT_BINS: usize = 32;

impl Binning {
    pub fn new(n_bins: usize, t_lo: f64, t_hi: f64) -> Result<Self> {
        if n_bins == 0 {
            return Err(CliError::Validation("need at least one bin".into()));
        }
        if !(t_lo < t_hi) || !t_lo.is_finite() || !t_hi.is_finite() {
            return Err(CliError::Validation(format!(
                "bin range [{t_lo}, {t_hi}] must satisfy t_lo < t_hi"
            )));
        }
        Ok(Binning { n_bins, t_lo, t_hi })
    }

    /// Default: 32 bins over [0, 1]; an experimental range occupies a subset.
    pub fn default_range() -> Self {
        Binning {
            n_bins: DEFAULT_BINS,
            t_lo: 0.0,
            t_hi: 1.0,
        }
    }

    /// Bin index for a transmission: ⌊n·(T − lo)/(hi − lo)⌋, with T = hi
    /// mapping onto the last bin. Out-of-range values are rejected (callers
    /// count them).
    pub fn index(&self, t: f64) -> Result<usize> {
        if !t.is_finite() || t < self.t_lo || t > self.t_hi {
            return Err(CliError::Validation(format!(
                "transmission {t} outside bin range [{}, {}]",
                self.t_lo, self.t_hi
            )));
        }
        if t == self.t_hi {
            return Ok(self.n_bins - 1);
        }
        let frac = (t - self.t_lo) / (self.t_hi - self.t_lo);
        Ok(((self.n_bins as f64 * frac) as usize).min(self.n_bins - 1))
    }

    /// Midpoint transmission of a bin.
    pub fn center(&self, index: usize) -> f64 {
        let width = (self.t_hi - self.t_lo) / self.n_bins as f64;
        self.t_lo + (index as f64 + 0.5) * width
    }
}
