//! Monte Carlo verification runs: honest robustness, repudiation, and
//! forging scenarios against their analytic bounds.
//!
//! Trials are independent and draw from per-trial streams derived with
//! `cvqds::trial_rng`, so runs parallelize freely and a report depends only
//! on (scenario, length, trials, seed).

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

use cvqds::protocol::{forging_trial, repudiation_trial, run_distribution, sign, trial_rng, verify};
use cvqds::security::{forging_bound, repudiation_bound_at, robustness_bound};
use cvqds::ChannelParams;

use crate::error::{CliError, Result};

/// What gets simulated and which bound applies.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    /// Full honest distribution + messaging; the robustness bound caps the
    /// rejection probability. `p_err` is the honest per-element mismatch
    /// rate used in the bound (the larger of the two recipients' rates).
    Honest {
        channel_bob: ChannelParams,
        channel_charlie: ChannelParams,
        s_a: f64,
        p_err: f64,
    },
    /// Repudiating sender with mismatch rates (p_B, p_C); the per-p
    /// repudiation bound at p = max(p_B, p_C) applies.
    Repudiate {
        p_b: f64,
        p_c: f64,
        s_a: f64,
        s_v: f64,
    },
    /// Forging recipient with the given per-element mismatch probability
    /// (his minimum measurement cost); the forging bound applies.
    Forge { mismatch_prob: f64, s_v: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloConfig {
    pub scenario: Scenario,
    /// Signature half-length L (must be even).
    pub length: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Outcome statistics for one Monte Carlo run.
///
/// `rate` is the empirical frequency of the scenario's event — acceptance
/// for honest runs, attack success for the adversarial ones — with its
/// exact (Clopper-Pearson) one-sided 95% interval. `bound` is the analytic
/// cap on the adverse event (rejection for honest runs, success for
/// attacks); `pass` records whether the run respects it.
#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    pub event: &'static str,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub bound: f64,
    pub pass: bool,
    pub seed: u64,
}

/// Exact one-sided upper 95% confidence limit on a binomial proportion.
pub fn clopper_pearson_upper(successes: u64, trials: u64) -> f64 {
    if successes >= trials {
        return 1.0;
    }
    Beta::new((successes + 1) as f64, (trials - successes) as f64)
        .expect("valid beta parameters")
        .inverse_cdf(0.95)
}

/// Exact one-sided lower 95% confidence limit on a binomial proportion.
pub fn clopper_pearson_lower(successes: u64, trials: u64) -> f64 {
    if successes == 0 {
        return 0.0;
    }
    Beta::new(successes as f64, (trials - successes + 1) as f64)
        .expect("valid beta parameters")
        .inverse_cdf(0.05)
}

fn validate_threshold(v: f64, name: &str) -> Result<()> {
    if (0.0..=1.0).contains(&v) && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{name} = {v} must lie in [0, 1]"
        )))
    }
}

pub fn run_monte_carlo(config: &MonteCarloConfig) -> Result<TrialReport> {
    if config.trials == 0 {
        return Err(CliError::Validation("need at least one trial".into()));
    }
    if config.length == 0 || config.length % 2 != 0 {
        return Err(CliError::Validation(format!(
            "signature length {} must be even and positive",
            config.length
        )));
    }

    let (event, bound): (&'static str, f64) = match &config.scenario {
        Scenario::Honest { s_a, p_err, channel_bob, channel_charlie } => {
            validate_threshold(*s_a, "s_a")?;
            channel_bob.validate().map_err(CliError::Core)?;
            channel_charlie.validate().map_err(CliError::Core)?;
            ("acceptance", robustness_bound(*p_err, *s_a, config.length as u64)?)
        }
        Scenario::Repudiate { p_b, p_c, s_a, s_v } => {
            validate_threshold(*p_b, "p_B")?;
            validate_threshold(*p_c, "p_C")?;
            validate_threshold(*s_a, "s_a")?;
            validate_threshold(*s_v, "s_v")?;
            if !(s_v > s_a) {
                return Err(CliError::Validation(format!(
                    "s_v = {s_v} must exceed s_a = {s_a}"
                )));
            }
            let p = p_b.max(*p_c);
            ("repudiation", repudiation_bound_at(p, *s_a, *s_v, config.length as u64))
        }
        Scenario::Forge { mismatch_prob, s_v } => {
            validate_threshold(*mismatch_prob, "mismatch_prob")?;
            validate_threshold(*s_v, "s_v")?;
            ("forgery", forging_bound(*mismatch_prob, *s_v, config.length as u64)?)
        }
    };

    let successes: u64 = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.seed, i);
            let hit = match &config.scenario {
                Scenario::Honest { channel_bob, channel_charlie, s_a, .. } => {
                    let outcome = run_distribution(config.length, channel_bob, channel_charlie, &mut rng)
                        .expect("validated inputs");
                    let signed = sign(&outcome.keys, 0);
                    verify(&signed, &outcome.bob[0], *s_a)
                        .expect("non-empty halves")
                        .accepted
                }
                Scenario::Repudiate { p_b, p_c, s_a, s_v } => {
                    repudiation_trial(*p_b, *p_c, *s_a, *s_v, config.length, &mut rng)
                        .expect("validated inputs")
                }
                Scenario::Forge { mismatch_prob, s_v } => {
                    forging_trial(*mismatch_prob, *s_v, config.length, &mut rng)
                        .expect("validated inputs")
                }
            };
            u64::from(hit)
        })
        .sum();

    let rate = successes as f64 / config.trials as f64;
    let ci_lower = clopper_pearson_lower(successes, config.trials);
    let ci_upper = clopper_pearson_upper(successes, config.trials);
    let pass = match &config.scenario {
        // Robustness: the empirical rejection rate itself stays below the bound.
        Scenario::Honest { .. } => (1.0 - rate) <= bound,
        // Attacks: even the upper confidence limit stays below the bound.
        _ => ci_upper <= bound,
    };

    Ok(TrialReport {
        event,
        trials: config.trials,
        successes,
        rate,
        ci_lower,
        ci_upper,
        bound,
        pass,
        seed: config.seed,
    })
}
