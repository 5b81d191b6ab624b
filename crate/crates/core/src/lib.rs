//! Simulation and security analysis of a three-party quantum digital
//! signature scheme built on heterodyne measurements of four phase-encoded
//! coherent states.
//!
//! The crate is organized around the scheme's pipeline:
//!
//! * [`alphabet`] — the four-state alphabet, quadrature statistics for the
//!   ideal and imperfect channel models, the seeded Gaussian sampler, and
//!   the sign-based state-elimination rule.
//! * [`costmatrix`] — 4×4 elimination cost matrices estimated from
//!   (sent, eliminated) records, their subsample error bars, and the
//!   constant-row decomposition that lower-bounds a forger's minimum cost.
//! * [`security`] — the p_min eigenvalue formula, equal-risk thresholds,
//!   Hoeffding bounds for repudiation/forging/robustness, the combined
//!   failure bound, and the signature-length solver with error bars.
//! * [`models`] — closed-form ideal-heterodyne, imperfect-heterodyne, and
//!   unambiguous-elimination theory models with optimal-amplitude search
//!   and length-versus-transmission curves.
//! * [`protocol`] — executable distribution and messaging stages with
//!   symmetrization, plus parameterized repudiation and forging adversaries
//!   for Monte Carlo verification of every bound.
//!
//! All operations are pure or take an explicit random stream; seeded runs
//! are reproducible element by element.

pub mod alphabet;
pub mod costmatrix;
pub mod error;
pub mod models;
pub mod numeric;
pub mod protocol;
pub mod security;

pub use alphabet::{
    eliminate, phase_amplitude, quadrature_stats, sample_element, ChannelModel, ChannelParams,
    EliminationPair, PhaseIndex, QuadratureRecord, QuadratureStats,
};
pub use costmatrix::{
    count_eliminations, subsample_errors, CostMatrix, Decomposition, ErrorMatrix,
    PerturbDirection,
};
pub use error::{Error, Result};
pub use models::{AlphaPolicy, CurvePoint, Model, ModelKind};
pub use protocol::{
    forging_trial, gen_private_keys, repudiation_mismatch_counts, repudiation_trial,
    run_distribution, sign, symmetrize, trial_rng, verify, AdversaryConfig, DistributionOutcome,
    EliminatedSignature, KeyPair, PrivateKey, RepudiationCounts, SignedMessage, Verdict,
};
pub use security::{
    failure_bound, forging_bound, lambdas, length_with_errors, p_min, repudiation_bound,
    repudiation_bound_at, required_length, robustness_bound, thresholds, Lambdas, LengthTriple,
    SecurityParams, SignatureLength,
};
