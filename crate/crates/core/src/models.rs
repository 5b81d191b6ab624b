//! Closed-form theory models for the required signature length.
//!
//! Three models cover the measurement schemes compared in the analysis:
//!
//! * `IdealHet` — heterodyne elimination with no imperfections:
//!   p_err = ½·erfc(√(T/2)·α), advantage ½ − p_err, so g = p_min·(½ − p_err).
//! * `ImperfectHet` — heterodyne with detector efficiency η, preparation
//!   excess noise ε, and electronic noise: p_err = ½·erfc(½ηTα/√(½ηTε+elect)),
//!   evaluated at the attenuated x amplitude, while p_min keeps the higher
//!   unattenuated p amplitude.
//! * `IdealUse` — unambiguous state elimination by single-photon detection:
//!   zero honest error, elimination probabilities p = 1 − e^{−Tα²} (antipode)
//!   and q = 1 − e^{−Tα²/2} (neighbours), giving C_min = g = p_min·q.
//!
//! In every model p_min uses the unattenuated α prepared by the sender — the
//! forger is assumed to intercept before channel loss.

use crate::alphabet::{
    ChannelParams, DEFAULT_ALPHA_RATIO, DEFAULT_ELECT, DEFAULT_EPSILON, DEFAULT_ETA,
};
use crate::costmatrix::CostMatrix;
use crate::error::{Error, Result};
use crate::numeric::erfc;
use crate::security::{p_min, required_length, SignatureLength};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    IdealHet,
    ImperfectHet,
    IdealUse,
}

/// A theory model: the measurement kind plus the imperfection figures (only
/// `ImperfectHet` reads them).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    pub kind: ModelKind,
    pub eta: f64,
    pub epsilon: f64,
    pub elect: f64,
    /// alpha_x / alpha_p: attenuation of the x-quadrature amplitude.
    pub alpha_ratio: f64,
}

/// How a length curve chooses α at each transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaPolicy {
    Fixed(f64),
    /// Maximize g independently at each transmission.
    Optimal,
}

/// One point of a length-versus-transmission curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub transmission: f64,
    pub alpha: f64,
    pub g: f64,
    pub length: SignatureLength,
}

impl Model {
    pub fn ideal_het() -> Self {
        Model {
            kind: ModelKind::IdealHet,
            eta: 1.0,
            epsilon: 1.0,
            elect: 0.0,
            alpha_ratio: 1.0,
        }
    }

    /// Imperfect heterodyne at the experimental defaults.
    pub fn imperfect_het() -> Self {
        Model {
            kind: ModelKind::ImperfectHet,
            eta: DEFAULT_ETA,
            epsilon: DEFAULT_EPSILON,
            elect: DEFAULT_ELECT,
            alpha_ratio: DEFAULT_ALPHA_RATIO,
        }
    }

    pub fn imperfect_het_with(eta: f64, epsilon: f64, elect: f64, alpha_ratio: f64) -> Self {
        Model {
            kind: ModelKind::ImperfectHet,
            eta,
            epsilon,
            elect,
            alpha_ratio,
        }
    }

    pub fn ideal_use() -> Self {
        Model {
            kind: ModelKind::IdealUse,
            eta: 1.0,
            epsilon: 1.0,
            elect: 0.0,
            alpha_ratio: 1.0,
        }
    }

    /// Probability of eliminating the sent state for an honest heterodyne
    /// recipient. `alpha` is the unattenuated (p-quadrature) amplitude; the
    /// imperfect model evaluates at the attenuated x amplitude, the lower of
    /// the two. Undefined for `IdealUse`, whose honest error is identically
    /// zero by construction.
    pub fn perr(&self, transmission: f64, alpha: f64) -> Result<f64> {
        validate_t_alpha(transmission, alpha)?;
        match self.kind {
            ModelKind::IdealHet => Ok(0.5 * erfc((transmission / 2.0).sqrt() * alpha)),
            ModelKind::ImperfectHet => {
                let alpha_x = self.alpha_ratio * alpha;
                let signal = 0.5 * self.eta * transmission * alpha_x;
                let noise = 0.5 * self.eta * transmission * self.epsilon + self.elect;
                Ok(0.5 * erfc(signal / noise.sqrt()))
            }
            ModelKind::IdealUse => Err(Error::UnsupportedModel(
                "IdealUse has a zero honest-error diagonal; p_err is undefined",
            )),
        }
    }

    /// The advantage g = C_min − p_err for this model.
    ///
    /// Heterodyne kinds: g = p_min(α)·(½ − p_err). Unambiguous elimination:
    /// the diagonal is zero, so C_min = g = p_min(α)·q.
    pub fn g(&self, transmission: f64, alpha: f64) -> Result<f64> {
        validate_t_alpha(transmission, alpha)?;
        match self.kind {
            ModelKind::IdealHet | ModelKind::ImperfectHet => {
                let p_err = self.perr(transmission, alpha)?;
                Ok(p_min(alpha) * (0.5 - p_err))
            }
            ModelKind::IdealUse => {
                let q = 1.0 - (-transmission * alpha * alpha / 2.0).exp();
                Ok(p_min(alpha) * q)
            }
        }
    }

    /// The model's 4×4 elimination cost matrix.
    ///
    /// Heterodyne rows satisfy the standard row invariants. The unambiguous
    /// matrix has zero diagonal and rows summing to p + 2q, so it is built in
    /// relaxed mode (entry range only).
    pub fn cost_matrix(&self, transmission: f64, alpha: f64) -> Result<CostMatrix> {
        match self.kind {
            ModelKind::IdealHet | ModelKind::ImperfectHet => {
                let p = self.perr(transmission, alpha)?;
                CostMatrix::from_probabilities([
                    [p, 0.5, 1.0 - p, 0.5],
                    [0.5, p, 0.5, 1.0 - p],
                    [1.0 - p, 0.5, p, 0.5],
                    [0.5, 1.0 - p, 0.5, p],
                ])
            }
            ModelKind::IdealUse => {
                validate_t_alpha(transmission, alpha)?;
                let ta2 = transmission * alpha * alpha;
                let p = 1.0 - (-ta2).exp();
                let q = 1.0 - (-ta2 / 2.0).exp();
                CostMatrix::from_probabilities_relaxed([
                    [0.0, q, p, q],
                    [q, 0.0, q, p],
                    [p, q, 0.0, q],
                    [q, p, q, 0.0],
                ])
            }
        }
    }

    /// Channel parameters that make the stochastic sampler reproduce this
    /// model. Undefined for `IdealUse` (no quadrature sampler).
    pub fn channel_params(&self, transmission: f64, alpha: f64) -> Result<ChannelParams> {
        match self.kind {
            ModelKind::IdealHet => ChannelParams::ideal(transmission, alpha),
            ModelKind::ImperfectHet => ChannelParams::imperfect(
                transmission,
                self.eta,
                self.epsilon,
                self.elect,
                self.alpha_ratio * alpha,
                alpha,
            ),
            ModelKind::IdealUse => Err(Error::UnsupportedModel(
                "IdealUse is not a quadrature sampler model",
            )),
        }
    }

    /// The amplitude maximizing g at this transmission, searched over
    /// α ∈ [0.01, 3].
    ///
    /// A coarse grid pre-scan checks unimodality; if the scan shows a single
    /// peak the bracket is refined by golden-section search to 1e-4,
    /// otherwise the grid argmax is returned as-is.
    pub fn optimal_alpha(&self, transmission: f64) -> Result<f64> {
        const LO: f64 = 0.01;
        const HI: f64 = 3.0;
        const GRID: usize = 60;

        let g_at = |alpha: f64| self.g(transmission, alpha).unwrap_or(f64::NEG_INFINITY);
        validate_t_alpha(transmission, LO)?;

        let step = (HI - LO) / GRID as f64;
        let values: Vec<f64> = (0..=GRID).map(|i| g_at(LO + i as f64 * step)).collect();
        let best = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();

        let peaks = (1..GRID)
            .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
            .count();
        let boundary_peak = (values[0] > values[1]) as usize + (values[GRID] > values[GRID - 1]) as usize;
        if peaks + boundary_peak > 1 {
            return Ok(LO + best as f64 * step);
        }

        let mut a = LO + step * best.saturating_sub(1) as f64;
        let mut b = (LO + step * (best + 1) as f64).min(HI);
        const INV_PHI: f64 = 0.618_033_988_749_894_8;
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let (mut fc, mut fd) = (g_at(c), g_at(d));
        while (b - a).abs() > 1e-4 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = g_at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = g_at(d);
            }
        }
        Ok((a + b) / 2.0)
    }

    /// Required length at each transmission under the given α policy. Points
    /// with g ≤ 0 are marked unbounded rather than dropped.
    pub fn length_curve(
        &self,
        policy: AlphaPolicy,
        transmissions: &[f64],
        target: f64,
    ) -> Result<Vec<CurvePoint>> {
        let mut curve = Vec::with_capacity(transmissions.len());
        for &t in transmissions {
            let alpha = match policy {
                AlphaPolicy::Fixed(a) => a,
                AlphaPolicy::Optimal => self.optimal_alpha(t)?,
            };
            let g = self.g(t, alpha)?;
            let length = if g > 0.0 {
                SignatureLength::Finite(required_length(g, target)?)
            } else {
                SignatureLength::Unbounded
            };
            curve.push(CurvePoint {
                transmission: t,
                alpha,
                g,
                length,
            });
        }
        Ok(curve)
    }
}

fn validate_t_alpha(transmission: f64, alpha: f64) -> Result<()> {
    if !(transmission > 0.0 && transmission <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "transmission {transmission} must lie in (0, 1]"
        )));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "alpha {alpha} must be finite and >= 0"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::security::p_min;

    #[test]
    fn perr_trivial_and_oracle_values() {
        let m = Model::ideal_het();
        assert_eq!(m.perr(1.0, 0.0).unwrap(), 0.5);
        // ½erfc(0.25), mpmath reference.
        let p = m.perr(0.5, 0.5).unwrap();
        assert!((p - 0.3618368049158815).abs() < 1e-13, "p = {p}");
        // At T = 1 the √(T/2) form reduces to ½erfc(α/√2).
        for alpha in [0.3, 0.48, 1.0] {
            let lossless = m.perr(1.0, alpha).unwrap();
            let direct = 0.5 * erfc(alpha / std::f64::consts::SQRT_2);
            assert!((lossless - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn perr_imperfect_oracle_value() {
        // ½erfc(0.214/√0.49228) with symmetric amplitudes, mpmath reference.
        let m = Model::imperfect_het_with(0.856, 1.01, 0.06, 1.0);
        let p = m.perr(1.0, 0.5).unwrap();
        assert!((p - 0.3331095230275425).abs() < 1e-13, "p = {p}");
    }

    #[test]
    fn perr_rejected_for_use_model() {
        assert!(matches!(
            Model::ideal_use().perr(1.0, 0.5),
            Err(Error::UnsupportedModel(_))
        ));
    }

    #[test]
    fn g_composes_p_min_and_perr() {
        // Ideal heterodyne at T = 1, α = 0.5 (mpmath composition).
        let g = Model::ideal_het().g(1.0, 0.5).unwrap();
        assert!((g - 0.08016470923134228).abs() < 1e-13, "g = {g}");

        // Unambiguous elimination at T = 1, α = 0.7: p_min(0.7)·(1 − e^{−0.245}).
        let g = Model::ideal_use().g(1.0, 0.7).unwrap();
        assert!((g - 0.05798428033792121).abs() < 1e-13, "g = {g}");
    }

    #[test]
    fn g_vanishes_with_transmission() {
        let m = Model::ideal_het();
        let g = m.g(1e-9, 0.5).unwrap();
        assert!(g.abs() < 1e-4);
        assert!(m.g(1e-9, 0.5).unwrap() < m.g(0.5, 0.5).unwrap());
    }

    #[test]
    fn heterodyne_cost_matrix_decomposes_to_half_minus_perr() {
        let m = Model::ideal_het();
        let p = m.perr(0.6, 0.48).unwrap();
        let matrix = m.cost_matrix(0.6, 0.48).unwrap();
        assert!(!matrix.is_relaxed());
        let d = matrix.decompose();
        assert_eq!(d.honest_cost, p);
        let expected = (0.5 - p).min(1.0 - 2.0 * p);
        assert!((d.advantage - expected).abs() < 1e-15);
        // For p_err < ½ the binding margin is the neighbour column, ½ − p_err.
        assert!((d.advantage - (0.5 - p)).abs() < 1e-15);
        // g from the matrix pipeline equals the closed form.
        let g = matrix.min_cost_bound(p_min(0.48)) - d.honest_cost;
        assert!((g - m.g(0.6, 0.48).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn use_cost_matrix_shape() {
        let m = Model::ideal_use().cost_matrix(1.0, 0.7).unwrap();
        assert!(m.is_relaxed());
        for i in 0..4 {
            assert_eq!(m.get(i, i), 0.0);
            for j in 0..4 {
                assert!((0.0..=1.0).contains(&m.get(i, j)));
            }
        }
        let q = 1.0 - (-0.49f64 / 2.0).exp();
        let p = 1.0 - (-0.49f64).exp();
        assert!((m.get(0, 1) - q).abs() < 1e-15);
        assert!((m.get(0, 2) - p).abs() < 1e-15);
        // C_min = p_min·q since the diagonal is zero.
        assert!((m.min_cost_bound(p_min(0.7)) - p_min(0.7) * q).abs() < 1e-15);
    }

    #[test]
    fn optimal_alpha_near_half_for_ideal_heterodyne() {
        let a = Model::ideal_het().optimal_alpha(1.0).unwrap();
        assert!((0.35..=0.65).contains(&a), "alpha* = {a}");
        // Local-max certificate.
        let m = Model::ideal_het();
        let g = m.g(1.0, a).unwrap();
        assert!(g >= m.g(1.0, a - 0.05).unwrap());
        assert!(g >= m.g(1.0, a + 0.05).unwrap());
    }

    #[test]
    fn optimal_alpha_near_point_seven_for_use() {
        let a = Model::ideal_use().optimal_alpha(1.0).unwrap();
        assert!((0.55..=0.85).contains(&a), "alpha* = {a}");
        let m = Model::ideal_use();
        let g = m.g(1.0, a).unwrap();
        assert!(g >= m.g(1.0, a - 0.05).unwrap());
        assert!(g >= m.g(1.0, a + 0.05).unwrap());
    }

    #[test]
    fn ideal_curve_monotone_and_below_use() {
        let ts: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let het = Model::ideal_het()
            .length_curve(AlphaPolicy::Fixed(0.5), &ts, 1e-4)
            .unwrap();
        let use_curve = Model::ideal_use()
            .length_curve(AlphaPolicy::Optimal, &ts, 1e-4)
            .unwrap();
        let imp = Model::imperfect_het()
            .length_curve(AlphaPolicy::Fixed(0.5), &ts, 1e-4)
            .unwrap();
        for i in 0..ts.len() {
            let l_het = het[i].length.finite().expect("finite het length");
            let l_use = use_curve[i].length.finite().expect("finite use length");
            let l_imp = imp[i].length.finite().expect("finite imperfect length");
            assert!(l_het < l_use, "T = {}: {l_het} !< {l_use}", ts[i]);
            assert!(l_imp >= l_het, "T = {}: {l_imp} < {l_het}", ts[i]);
            if i > 0 {
                let prev = het[i - 1].length.finite().unwrap();
                assert!(l_het <= prev, "non-monotone at T = {}", ts[i]);
            }
        }
    }

    #[test]
    fn curve_marks_degenerate_points_unbounded() {
        // α = 0 gives p_err = ½ and g = 0 at every T.
        let curve = Model::ideal_het()
            .length_curve(AlphaPolicy::Fixed(0.0), &[0.5, 1.0], 1e-4)
            .unwrap();
        assert!(curve
            .iter()
            .all(|pt| pt.length == SignatureLength::Unbounded));
    }

    #[test]
    fn parameter_validation() {
        let m = Model::ideal_het();
        assert!(m.perr(0.0, 0.5).is_err());
        assert!(m.perr(1.5, 0.5).is_err());
        assert!(m.g(0.5, -1.0).is_err());
    }
}
