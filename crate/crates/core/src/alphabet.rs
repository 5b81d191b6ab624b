//! The four-state coherent alphabet and its heterodyne measurement statistics.
//!
//! A sender encodes each signature element as one of four phase-encoded
//! coherent states |α·i^k⟩ for k ∈ {0,1,2,3}. A receiver measures both
//! quadratures at once (heterodyne detection) and, from the sign of each
//! outcome, eliminates one state per quadrature: the state whose signal
//! component points the other way.
//!
//! Quadrature outcomes are modelled as two independent Gaussians in
//! shot-noise units. Two channel models are provided:
//!
//! * **Ideal** — mean √T·α along the signed component, unit variance, so the
//!   probability of eliminating the sent state is ½·erfc(√(T/2)·α).
//! * **Imperfect** — mean ½·η·T·α and variance ½·(½·η·T·ε + elect), giving
//!   ½·erfc( ½·η·T·α / √(½·η·T·ε + elect) ). With η = 1, ε = 1, elect = 0
//!   this reduces to the ideal expression.
//!
//! Both models are calibrated so the sign-error probability reproduces those
//! closed forms exactly; the (μ, σ²) pairs are not on a single shared
//! physical normalization.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::numeric::standard_normal;

/// Detector efficiency used in the experiments backing the imperfect model.
pub const DEFAULT_ETA: f64 = 0.856;
/// Preparation excess variance (shot-noise units).
pub const DEFAULT_EPSILON: f64 = 1.01;
/// Electronic noise variance, midpoint of the observed 0.04–0.08 range.
pub const DEFAULT_ELECT: f64 = 0.06;
/// The x-quadrature modulator sits behind the p-quadrature one and is
/// attenuated by its 95% transmittance.
pub const DEFAULT_ALPHA_RATIO: f64 = 0.95;

/// One of the four signature symbols, encoding phase φ = k·π/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhaseIndex {
    /// |α⟩, φ = 0
    K0 = 0,
    /// |iα⟩, φ = π/2
    K1 = 1,
    /// |−α⟩, φ = π
    K2 = 2,
    /// |−iα⟩, φ = 3π/2
    K3 = 3,
}

impl PhaseIndex {
    pub const ALL: [PhaseIndex; 4] = [
        PhaseIndex::K0,
        PhaseIndex::K1,
        PhaseIndex::K2,
        PhaseIndex::K3,
    ];

    /// The symbol as a row/column index in {0,1,2,3}.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(k: u64) -> Result<Self> {
        match k {
            0 => Ok(PhaseIndex::K0),
            1 => Ok(PhaseIndex::K1),
            2 => Ok(PhaseIndex::K2),
            3 => Ok(PhaseIndex::K3),
            other => Err(Error::InvalidPhase(other)),
        }
    }

    /// The opposite state on the phase circle, (k + 2) mod 4.
    pub fn antipode(self) -> Self {
        PhaseIndex::ALL[(self.index() + 2) % 4]
    }

    /// Unit signs of the (x, p) signal components: exactly one is ±1, the
    /// other 0. This is the four-case table behind `phase_amplitude`.
    pub fn component_signs(self) -> (i8, i8) {
        match self {
            PhaseIndex::K0 => (1, 0),
            PhaseIndex::K1 => (0, 1),
            PhaseIndex::K2 => (-1, 0),
            PhaseIndex::K3 => (0, -1),
        }
    }
}

/// (Re, Im) components of |α·i^k⟩ in phase space: (α·cos(kπ/2), α·sin(kπ/2)).
///
/// Uses the exact four-case sign table, so components are exactly ±α or 0.
pub fn phase_amplitude(k: PhaseIndex, alpha: f64) -> (f64, f64) {
    let (sx, sp) = k.component_signs();
    (f64::from(sx) * alpha, f64::from(sp) * alpha)
}

/// Which measurement model generates the quadrature statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelModel {
    /// Lossy but otherwise perfect heterodyne detection.
    Ideal,
    /// Heterodyne detection with finite detector efficiency, preparation
    /// excess noise, and electronic noise.
    Imperfect,
}

/// Channel and preparation parameters for one transmission.
///
/// All noise figures are in shot-noise units (vacuum quadrature variance = 1
/// in the ideal convention). `alpha_x` and `alpha_p` are the per-quadrature
/// signal amplitudes; the ideal model forces them equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub model: ChannelModel,
    /// Channel transmission T ∈ (0, 1].
    pub transmission: f64,
    /// Detection efficiency η ∈ (0, 1].
    pub eta: f64,
    /// Preparation variance ε ≥ 1.
    pub epsilon: f64,
    /// Electronic noise variance ≥ 0.
    pub elect: f64,
    pub alpha_x: f64,
    pub alpha_p: f64,
}

impl ChannelParams {
    /// Ideal channel: η = 1, ε = 1, no electronic noise, symmetric amplitude.
    pub fn ideal(transmission: f64, alpha: f64) -> Result<Self> {
        let ch = ChannelParams {
            model: ChannelModel::Ideal,
            transmission,
            eta: 1.0,
            epsilon: 1.0,
            elect: 0.0,
            alpha_x: alpha,
            alpha_p: alpha,
        };
        ch.validate()?;
        Ok(ch)
    }

    /// Imperfect channel with explicit noise figures and per-quadrature
    /// amplitudes.
    pub fn imperfect(
        transmission: f64,
        eta: f64,
        epsilon: f64,
        elect: f64,
        alpha_x: f64,
        alpha_p: f64,
    ) -> Result<Self> {
        let ch = ChannelParams {
            model: ChannelModel::Imperfect,
            transmission,
            eta,
            epsilon,
            elect,
            alpha_x,
            alpha_p,
        };
        ch.validate()?;
        Ok(ch)
    }

    /// Imperfect channel at the experimental defaults, with the x amplitude
    /// attenuated to 95% of `alpha_p` by the second modulator.
    pub fn imperfect_default(transmission: f64, alpha_p: f64) -> Result<Self> {
        Self::imperfect(
            transmission,
            DEFAULT_ETA,
            DEFAULT_EPSILON,
            DEFAULT_ELECT,
            DEFAULT_ALPHA_RATIO * alpha_p,
            alpha_p,
        )
    }

    /// Same parameters at a different transmission (fading channels draw a
    /// fresh T per element).
    pub fn with_transmission(mut self, transmission: f64) -> Result<Self> {
        self.transmission = transmission;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, msg: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter(msg.to_string()))
            }
        }
        check(
            self.transmission > 0.0 && self.transmission <= 1.0,
            "transmission must lie in (0, 1]",
        )?;
        check(self.eta > 0.0 && self.eta <= 1.0, "eta must lie in (0, 1]")?;
        check(self.epsilon >= 1.0, "epsilon must be >= 1")?;
        check(self.elect >= 0.0, "elect must be >= 0")?;
        check(
            self.alpha_x >= 0.0 && self.alpha_p >= 0.0,
            "amplitudes must be >= 0",
        )?;
        check(
            [
                self.transmission,
                self.eta,
                self.epsilon,
                self.elect,
                self.alpha_x,
                self.alpha_p,
            ]
            .iter()
            .all(|v| v.is_finite()),
            "parameters must be finite",
        )?;
        if self.model == ChannelModel::Ideal {
            check(
                self.eta == 1.0 && self.epsilon == 1.0 && self.elect == 0.0,
                "ideal model requires eta = 1, epsilon = 1, elect = 0",
            )?;
            check(
                self.alpha_x == self.alpha_p,
                "ideal model requires alpha_x = alpha_p",
            )?;
        }
        Ok(())
    }
}

/// Gaussian mean of each quadrature and their common variance for one sent
/// symbol under one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureStats {
    pub mu_x: f64,
    pub mu_p: f64,
    pub var: f64,
}

/// Per-quadrature Gaussian statistics for symbol `k` under channel `ch`.
///
/// The ± / 0 structure of the means follows `phase_amplitude`; the scale and
/// variance are calibrated so the sign-error probability matches the model's
/// closed form (see the module docs).
pub fn quadrature_stats(k: PhaseIndex, ch: &ChannelParams) -> QuadratureStats {
    let (sx, sp) = k.component_signs();
    match ch.model {
        ChannelModel::Ideal => {
            let scale = ch.transmission.sqrt();
            QuadratureStats {
                mu_x: f64::from(sx) * scale * ch.alpha_x,
                mu_p: f64::from(sp) * scale * ch.alpha_p,
                var: 1.0,
            }
        }
        ChannelModel::Imperfect => {
            let scale = 0.5 * ch.eta * ch.transmission;
            QuadratureStats {
                mu_x: f64::from(sx) * scale * ch.alpha_x,
                mu_p: f64::from(sp) * scale * ch.alpha_p,
                var: 0.5 * (0.5 * ch.eta * ch.transmission * ch.epsilon + ch.elect),
            }
        }
    }
}

/// One heterodyne outcome: both quadratures in shot-noise units, the measured
/// transmission, and (for calibration data) the symbol that was sent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRecord {
    pub x: f64,
    pub p: f64,
    pub transmission: f64,
    /// Present in calibration/estimation data, absent in adversarial views.
    pub sent: Option<PhaseIndex>,
}

/// Simulate one heterodyne outcome for symbol `k` under channel `ch`.
///
/// Draw order is fixed: x first, then p, each consuming exactly one `u64`
/// from `rng` through the inverse-CDF normal transform. Seeded runs are
/// therefore reproducible element by element.
pub fn sample_element<R: RngCore + ?Sized>(
    k: PhaseIndex,
    ch: &ChannelParams,
    rng: &mut R,
) -> QuadratureRecord {
    let stats = quadrature_stats(k, ch);
    let sd = stats.var.sqrt();
    let x = stats.mu_x + sd * standard_normal(rng);
    let p = stats.mu_p + sd * standard_normal(rng);
    QuadratureRecord {
        x,
        p,
        transmission: ch.transmission,
        sent: Some(k),
    }
}

/// The two states ruled out by one heterodyne outcome: one of {|α⟩, |−α⟩}
/// from the x sign and one of {|iα⟩, |−iα⟩} from the p sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EliminationPair {
    /// Always K0 or K2.
    pub elim_x: PhaseIndex,
    /// Always K1 or K3.
    pub elim_p: PhaseIndex,
}

impl EliminationPair {
    /// Whether symbol `k` is one of the two eliminated states.
    pub fn contains(&self, k: PhaseIndex) -> bool {
        self.elim_x == k || self.elim_p == k
    }
}

/// Apply the sign rule: a non-negative x eliminates |−α⟩ (K2), a negative x
/// eliminates |α⟩ (K0); likewise p ≥ 0 eliminates |−iα⟩ (K3) and p < 0
/// eliminates |iα⟩ (K1). An exact zero counts as positive (measure-zero tie).
pub fn eliminate(record: &QuadratureRecord) -> EliminationPair {
    EliminationPair {
        elim_x: if record.x >= 0.0 {
            PhaseIndex::K2
        } else {
            PhaseIndex::K0
        },
        elim_p: if record.p >= 0.0 {
            PhaseIndex::K3
        } else {
            PhaseIndex::K1
        },
    }
}
