//! Closed-form security quantities: the minimum misidentification probability
//! p_min, the acceptance thresholds, the Hoeffding failure bounds, and the
//! signature-length solver.
//!
//! All bounds are per-message with `L` the half-length of the eliminated
//! signature (each of the two verification parts holds L/2 elements; the full
//! signature for a one-bit message uses 2L states). Exponents are evaluated
//! in log space and every probability clamps into [0, 1] on output.

use crate::costmatrix::{CostMatrix, ErrorMatrix, PerturbDirection};
use crate::error::{Error, Result};

/// Gram-matrix eigenvalues of the four-state coherent alphabet:
///
///   λ₁,₂ = 2·e^{−α²}·[cosh(α²) ± cos(α²)]
///   λ₃,₄ = 2·e^{−α²}·[sinh(α²) ± sin(α²)]
///
/// Their sum is exactly 4 (trace identity) for every α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambdas {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
}

impl Lambdas {
    pub fn as_array(&self) -> [f64; 4] {
        [self.l1, self.l2, self.l3, self.l4]
    }

    pub fn sum(&self) -> f64 {
        self.l1 + self.l2 + self.l3 + self.l4
    }
}

pub fn lambdas(alpha: f64) -> Lambdas {
    let a2 = alpha * alpha;
    let scale = 2.0 * (-a2).exp();
    Lambdas {
        l1: scale * (a2.cosh() + a2.cos()),
        l2: scale * (a2.cosh() - a2.cos()),
        l3: scale * (a2.sinh() + a2.sin()),
        l4: scale * (a2.sinh() - a2.sin()),
    }
}

/// Minimum probability of misidentifying one of the four coherent states:
/// p_min = 1 − (1/16)·(Σᵢ √λᵢ)².
///
/// Equals 3/4 at α = 0 (pure guessing among four identical states) and falls
/// monotonically to 0 as the states become orthogonal.
pub fn p_min(alpha: f64) -> f64 {
    let l = lambdas(alpha);
    let s: f64 = l.as_array().iter().map(|&v| v.max(0.0).sqrt()).sum();
    (1.0 - s * s / 16.0).clamp(0.0, 1.0)
}

/// Equal-risk thresholds: s_a = p_err + g/4 and s_v = p_err + 3g/4 with
/// g = c_min − p_err, making the repudiation, forging, and robustness
/// exponents coincide.
pub fn thresholds(p_err: f64, c_min: f64) -> Result<(f64, f64)> {
    let g = c_min - p_err;
    if g <= 0.0 {
        return Err(Error::NoSecurity(format!(
            "c_min = {c_min} does not exceed p_err = {p_err}"
        )));
    }
    Ok((p_err + g / 4.0, p_err + 3.0 * g / 4.0))
}

fn clamped_exp(prefactor: f64, neg_exponent: f64) -> f64 {
    // bound = prefactor · exp(−neg_exponent), clamped to 1: compare in log
    // space so huge exponents cannot overflow intermediate values.
    let log_bound = prefactor.ln() - neg_exponent;
    if log_bound >= 0.0 {
        1.0
    } else {
        log_bound.exp()
    }
}

/// Bound on the repudiation probability at the attacker's optimal mismatch
/// rate p = (s_a + s_v)/2:  min(1, 2·exp[−(s_v − s_a)²·L/4]).
pub fn repudiation_bound(s_a: f64, s_v: f64, l: u64) -> f64 {
    let gap = s_v - s_a;
    clamped_exp(2.0, gap * gap * l as f64 / 4.0)
}

/// Bound on the repudiation probability for a specific attacker mismatch
/// rate p:  min(1, min{2·exp[−(p − s_a)²·L], 2·exp[−(s_v − p)²·L]}).
///
/// Maximized over p at (s_a + s_v)/2, where it equals `repudiation_bound`.
pub fn repudiation_bound_at(p: f64, s_a: f64, s_v: f64, l: u64) -> f64 {
    let first = clamped_exp(2.0, (p - s_a).powi(2) * l as f64);
    let second = clamped_exp(2.0, (s_v - p).powi(2) * l as f64);
    first.min(second)
}

/// Bound on the forging probability: exp[−(c_min − s_v)²·L].
///
/// Requires c_min > s_v; otherwise the forger's cost is within the
/// verification threshold and no bound holds.
pub fn forging_bound(c_min: f64, s_v: f64, l: u64) -> Result<f64> {
    let gap = c_min - s_v;
    if gap <= 0.0 {
        return Err(Error::NoSecurity(format!(
            "c_min = {c_min} does not exceed s_v = {s_v}"
        )));
    }
    Ok(clamped_exp(1.0, gap * gap * l as f64))
}

/// Bound on the probability that an honest run is rejected:
/// min(1, 2·exp[−(s_a − p_err)²·L]).
///
/// Requires s_a > p_err; otherwise honest runs fail routinely.
pub fn robustness_bound(p_err: f64, s_a: f64, l: u64) -> Result<f64> {
    let gap = s_a - p_err;
    if gap <= 0.0 {
        return Err(Error::NoSecurity(format!(
            "s_a = {s_a} does not exceed p_err = {p_err} (not robust)"
        )));
    }
    Ok(clamped_exp(2.0, gap * gap * l as f64))
}

/// Combined failure bound under equal-risk thresholds:
/// min(1, 2·exp(−g²·L/16)) with g = c_min − p_err.
pub fn failure_bound(g: f64, l: u64) -> Result<f64> {
    if g <= 0.0 {
        return Err(Error::NoSecurity(format!("gap g = {g} must be positive")));
    }
    Ok(clamped_exp(2.0, g * g * l as f64 / 16.0))
}

/// Smallest half-length L with 2·exp(−g²·L/16) ≤ target, i.e.
/// L = ⌈16·ln(2/target)/g²⌉, and at least 1.
///
/// The full signature for a one-bit message uses 2L states. The ceiling
/// comparison carries a 10⁻¹² relative slack so that inverting a value
/// produced by `failure_bound` lands back on the same L instead of one above
/// it (exp/ln round-trips wobble by an ulp).
pub fn required_length(g: f64, target: f64) -> Result<u64> {
    if g <= 0.0 {
        return Err(Error::NoSecurity(format!("gap g = {g} must be positive")));
    }
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "target failure probability {target} must be positive"
        )));
    }
    let need = 16.0 * (2.0 / target).ln();
    if need <= 0.0 {
        return Ok(1); // the bound is vacuously met already
    }
    let threshold = need / (g * g);
    let l = (threshold * (1.0 - 1e-12)).ceil();
    Ok((l as u64).max(1))
}

/// A required signature half-length, or the marker for degenerate data where
/// no finite length reaches the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SignatureLength {
    Finite(u64),
    /// Worst-case advantage ≤ 0: lengthening the signature does not help.
    Unbounded,
}

impl SignatureLength {
    pub fn finite(&self) -> Option<u64> {
        match self {
            SignatureLength::Finite(l) => Some(*l),
            SignatureLength::Unbounded => None,
        }
    }
}

impl std::fmt::Display for SignatureLength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SignatureLength::Finite(l) => write!(f, "{l}"),
            SignatureLength::Unbounded => write!(f, "unbounded"),
        }
    }
}

/// Best-case, nominal, and worst-case required lengths from a cost matrix and
/// its statistical errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthTriple {
    pub best: SignatureLength,
    pub nominal: SignatureLength,
    pub worst: SignatureLength,
}

fn length_from_matrix(matrix: &CostMatrix, p_min: f64, target: f64) -> Result<SignatureLength> {
    let advantage = matrix.decompose().advantage;
    let g = advantage * p_min;
    if g <= 0.0 {
        return Ok(SignatureLength::Unbounded);
    }
    required_length(g, target).map(SignatureLength::Finite)
}

/// Required length plus its error bar: the nominal length from `matrix`, the
/// worst case from the diagonal-up perturbation (smaller g, longer L — the
/// length to actually run with), and the best case from the opposite
/// perturbation. Guarantees best ≤ nominal ≤ worst.
pub fn length_with_errors(
    matrix: &CostMatrix,
    errors: &ErrorMatrix,
    p_min: f64,
    target: f64,
) -> Result<LengthTriple> {
    let nominal = length_from_matrix(matrix, p_min, target)?;
    let worst = length_from_matrix(&matrix.perturb(errors, PerturbDirection::Worst), p_min, target)?;
    let best = length_from_matrix(&matrix.perturb(errors, PerturbDirection::Best), p_min, target)?;
    Ok(LengthTriple {
        best,
        nominal,
        worst,
    })
}

/// The resolved security parameters for one dataset: error rates, thresholds,
/// and the solved length for a target failure probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecurityParams {
    /// Honest mismatch rate (the cost matrix diagonal average).
    pub p_err: f64,
    /// Lower bound on the forger's cost.
    pub c_min: f64,
    /// Advantage g = c_min − p_err.
    pub g: f64,
    /// Authentication threshold, p_err + g/4.
    pub s_a: f64,
    /// Verification threshold, p_err + 3g/4.
    pub s_v: f64,
    /// Target failure probability.
    pub target: f64,
    /// Signature half-length meeting the target.
    pub length: u64,
}

impl SecurityParams {
    /// Derive thresholds and length from (p_err, c_min) under the equal-risk
    /// rule. Fails when c_min ≤ p_err (no security margin).
    pub fn derive(p_err: f64, c_min: f64, target: f64) -> Result<Self> {
        let (s_a, s_v) = thresholds(p_err, c_min)?;
        let g = c_min - p_err;
        let length = required_length(g, target)?;
        Ok(SecurityParams {
            p_err,
            c_min,
            g,
            s_a,
            s_v,
            target,
            length,
        })
    }
}
