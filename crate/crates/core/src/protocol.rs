//! Executable three-party protocol: distribution, symmetrization, messaging,
//! and parameterized adversaries for Monte Carlo bound verification.
//!
//! The distribution stage sends one quantum signature per possible message
//! bit to each recipient, who measures and eliminates immediately. The
//! recipients then symmetrize: each forwards a uniformly random half of his
//! elimination results to the other over a channel secret from the sender,
//! leaving every recipient with a `direct` half (measured himself) and a
//! `forwarded` half (received from the peer), each of exactly L/2 elements.
//!
//! Verification counts, per half, how many declared key phases were
//! eliminated; a message is accepted when both halves show a mismatch
//! fraction strictly below the threshold (authentication threshold s_a for
//! a message straight from the sender, the looser verification threshold
//! s_v for a forwarded one).
//!
//! Adversaries are modelled as per-element Bernoulli mismatch processes —
//! exactly the abstraction the concentration bounds constrain. A repudiating
//! sender controls the mismatch rates p_B and p_C of the states first sent
//! to each recipient; a forging recipient causes no mismatches on the half
//! he forwarded and guesses the rest at his measurement's cost.
//!
//! Every trial is deterministic given its own random stream; `trial_rng`
//! derives independent per-trial streams from a master seed so trials can
//! run in parallel in any order.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::alphabet::{eliminate, sample_element, ChannelParams, EliminationPair, PhaseIndex};
use crate::error::{Error, Result};

/// The classical description of one quantum signature sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateKey {
    pub message_bit: u8,
    pub phases: Vec<PhaseIndex>,
}

/// The private keys for both possible one-bit messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub key0: PrivateKey,
    pub key1: PrivateKey,
}

impl KeyPair {
    pub fn key(&self, message_bit: u8) -> &PrivateKey {
        if message_bit == 0 {
            &self.key0
        } else {
            &self.key1
        }
    }
}

/// One stored elimination result, tagged with its sequence position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureElement {
    pub position: usize,
    pub pair: EliminationPair,
}

/// A recipient's eliminated signature for one message bit, in two halves of
/// L/2 elements each. `direct` holds results the recipient measured himself
/// on states straight from the sender; `forwarded` holds results the peer
/// measured and passed on during symmetrization. The half a result sits in
/// is its origin tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminatedSignature {
    pub direct: Vec<SignatureElement>,
    pub forwarded: Vec<SignatureElement>,
}

/// A declared message: the bit and the corresponding private key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedMessage {
    pub message_bit: u8,
    pub phases: Vec<PhaseIndex>,
}

/// Outcome of checking a signed message against one eliminated signature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub accepted: bool,
    pub mismatch_fraction_direct: f64,
    pub mismatch_fraction_forwarded: f64,
    pub threshold: f64,
}

/// Adversary scenarios for Monte Carlo runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdversaryConfig {
    HonestAll,
    /// The sender aims for one recipient to accept what the other rejects,
    /// with full control of the per-element mismatch probabilities.
    RepudiatingAlice { p_b: f64, p_c: f64 },
    /// A recipient forges a forwarded message; `mismatch_prob` is his
    /// per-element probability of declaring an eliminated state, bounded
    /// below by the minimum measurement cost.
    ForgingBob { mismatch_prob: f64 },
}

impl AdversaryConfig {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AdversaryConfig::HonestAll => Ok(()),
            AdversaryConfig::RepudiatingAlice { p_b, p_c } => {
                validate_probability(p_b, "p_B")?;
                validate_probability(p_c, "p_C")
            }
            AdversaryConfig::ForgingBob { mismatch_prob } => {
                validate_probability(mismatch_prob, "mismatch_prob")
            }
        }
    }
}

/// Derive the random stream for one trial from a master seed. Stream i seeds
/// ChaCha12 with the 32-byte block [master (LE) | i (LE) | zeros], so
/// distinct trials never share a stream and results are independent of
/// evaluation order.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha12Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&trial_index.to_le_bytes());
    ChaCha12Rng::from_seed(seed)
}

/// Generate the private keys for message bits 0 and 1: 2L independent
/// uniform phase draws (bit 0 first).
pub fn gen_private_keys<R: RngCore + ?Sized>(length: usize, rng: &mut R) -> Result<KeyPair> {
    if length == 0 {
        return Err(Error::InvalidParameter(
            "signature length must be at least 1".into(),
        ));
    }
    let mut draw = |bit: u8| PrivateKey {
        message_bit: bit,
        phases: (0..length)
            .map(|_| PhaseIndex::ALL[rng.random_range(0..4usize)])
            .collect(),
    };
    Ok(KeyPair {
        key0: draw(0),
        key1: draw(1),
    })
}

/// Uniformly choose exactly ⌊n/2⌋ of the positions 0..n to forward; returns
/// (retained, forwarded) index lists, each sorted.
fn split_half<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let mut forwarded: Vec<usize> = rand::seq::index::sample(rng, n, n / 2).into_vec();
    forwarded.sort_unstable();
    let mut mark = vec![false; n];
    for &i in &forwarded {
        mark[i] = true;
    }
    let retained = (0..n).filter(|&i| !mark[i]).collect();
    (retained, forwarded)
}

fn gather<T: Copy>(results: &[T], positions: &[usize]) -> Vec<(usize, T)> {
    positions.iter().map(|&i| (i, results[i])).collect()
}

fn measure_sequence<R: RngCore + ?Sized>(
    phases: &[PhaseIndex],
    ch: &ChannelParams,
    rng: &mut R,
) -> Vec<EliminationPair> {
    phases
        .iter()
        .map(|&k| eliminate(&sample_element(k, ch, rng)))
        .collect()
}

/// Symmetrize both recipients' measurement results for one message bit.
///
/// Each recipient independently forwards a uniformly random subset of
/// exactly L/2 of his results (positions and elimination pairs) to the
/// other; the sender learns nothing about either subset. Requires an even L
/// so the two halves have the well-defined size L/2. Draw order: the first
/// recipient's subset, then the second's.
pub fn symmetrize<R: RngCore + ?Sized>(
    bob_results: &[EliminationPair],
    charlie_results: &[EliminationPair],
    rng: &mut R,
) -> Result<(EliminatedSignature, EliminatedSignature)> {
    if bob_results.len() != charlie_results.len() {
        return Err(Error::InvalidParameter(
            "recipients must hold results for the same length".into(),
        ));
    }
    let n = bob_results.len();
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "signature length {n} must be even and positive"
        )));
    }
    let (bob_keep, bob_fwd) = split_half(n, rng);
    let (charlie_keep, charlie_fwd) = split_half(n, rng);
    let signature = |keep: &[usize], own: &[EliminationPair], fwd_in: &[usize], peer: &[EliminationPair]| {
        EliminatedSignature {
            direct: gather(own, keep)
                .into_iter()
                .map(|(position, pair)| SignatureElement { position, pair })
                .collect(),
            forwarded: gather(peer, fwd_in)
                .into_iter()
                .map(|(position, pair)| SignatureElement { position, pair })
                .collect(),
        }
    };
    Ok((
        signature(&bob_keep, bob_results, &charlie_fwd, charlie_results),
        signature(&charlie_keep, charlie_results, &bob_fwd, bob_results),
    ))
}

/// Everything produced by an honest distribution stage.
#[derive(Debug, Clone)]
pub struct DistributionOutcome {
    pub keys: KeyPair,
    /// Bob's eliminated signatures, indexed by message bit.
    pub bob: [EliminatedSignature; 2],
    /// Charlie's eliminated signatures, indexed by message bit.
    pub charlie: [EliminatedSignature; 2],
}

/// Run the distribution stage honestly: generate keys, measure both copies
/// of both signatures through the recipients' channels, eliminate, and
/// symmetrize.
///
/// Draw order: keys, then per bit (0 first): Bob's L elements, Charlie's L
/// elements, Bob's forwarding subset, Charlie's forwarding subset.
pub fn run_distribution<R: RngCore + ?Sized>(
    length: usize,
    ch_bob: &ChannelParams,
    ch_charlie: &ChannelParams,
    rng: &mut R,
) -> Result<DistributionOutcome> {
    if length == 0 || length % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "signature length {length} must be even and positive"
        )));
    }
    ch_bob.validate()?;
    ch_charlie.validate()?;
    let keys = gen_private_keys(length, rng)?;

    let mut bob = Vec::with_capacity(2);
    let mut charlie = Vec::with_capacity(2);
    for bit in 0..2u8 {
        let phases = &keys.key(bit).phases;
        let bob_results = measure_sequence(phases, ch_bob, rng);
        let charlie_results = measure_sequence(phases, ch_charlie, rng);
        let (b, c) = symmetrize(&bob_results, &charlie_results, rng)?;
        bob.push(b);
        charlie.push(c);
    }
    let [b0, b1] = <[EliminatedSignature; 2]>::try_from(bob).unwrap();
    let [c0, c1] = <[EliminatedSignature; 2]>::try_from(charlie).unwrap();
    Ok(DistributionOutcome {
        keys,
        bob: [b0, b1],
        charlie: [c0, c1],
    })
}

/// Messaging stage, sender side: declare the bit and its private key.
pub fn sign(keys: &KeyPair, message_bit: u8) -> SignedMessage {
    let key = keys.key(message_bit);
    SignedMessage {
        message_bit: key.message_bit,
        phases: key.phases.clone(),
    }
}

fn half_mismatch_fraction(
    half: &[SignatureElement],
    phases: &[PhaseIndex],
    name: &'static str,
) -> Result<f64> {
    if half.is_empty() {
        return Err(Error::EmptySignatureHalf(name));
    }
    let mut mismatches = 0usize;
    for element in half {
        let declared = *phases.get(element.position).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "signature position {} outside declared key of length {}",
                element.position,
                phases.len()
            ))
        })?;
        if element.pair.contains(declared) {
            mismatches += 1;
        }
    }
    Ok(mismatches as f64 / half.len() as f64)
}

/// Messaging stage, recipient side: count per half how many declared phases
/// were eliminated, accepting only if both fractions are strictly below the
/// threshold.
pub fn verify(
    signed: &SignedMessage,
    signature: &EliminatedSignature,
    threshold: f64,
) -> Result<Verdict> {
    let direct = half_mismatch_fraction(&signature.direct, &signed.phases, "direct")?;
    let forwarded = half_mismatch_fraction(&signature.forwarded, &signed.phases, "forwarded")?;
    Ok(Verdict {
        accepted: direct < threshold && forwarded < threshold,
        mismatch_fraction_direct: direct,
        mismatch_fraction_forwarded: forwarded,
        threshold,
    })
}

fn bernoulli_vec<R: RngCore + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<bool> {
    (0..n).map(|_| rng.random::<f64>() < p).collect()
}

fn count_true(items: &[(usize, bool)]) -> usize {
    items.iter().filter(|(_, hit)| *hit).count()
}

fn validate_probability(p: f64, name: &str) -> Result<()> {
    if (0.0..=1.0).contains(&p) && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {p} must lie in [0, 1]"
        )))
    }
}

/// Per-half mismatch counts seen by the two recipients in one repudiation
/// attempt, before any threshold is applied. Each half holds L/2 elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepudiationCounts {
    pub bob_direct: usize,
    pub bob_forwarded: usize,
    pub charlie_direct: usize,
    pub charlie_forwarded: usize,
}

/// Plant latent mismatch indicators (Bernoulli(p_B) on states first sent to
/// Bob, Bernoulli(p_C) on states first sent to Charlie) and ride them
/// through symmetrization, returning the four half counts.
///
/// Draw order: Bob's L indicators, Charlie's L indicators, Bob's forwarding
/// subset, Charlie's forwarding subset.
pub fn repudiation_mismatch_counts<R: RngCore + ?Sized>(
    p_b: f64,
    p_c: f64,
    length: usize,
    rng: &mut R,
) -> Result<RepudiationCounts> {
    validate_probability(p_b, "p_B")?;
    validate_probability(p_c, "p_C")?;
    if length == 0 || length % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "signature length {length} must be even and positive"
        )));
    }
    let bob_hits = bernoulli_vec(length, p_b, rng);
    let charlie_hits = bernoulli_vec(length, p_c, rng);
    let (bob_keep, bob_fwd) = split_half(length, rng);
    let (charlie_keep, charlie_fwd) = split_half(length, rng);
    let count = |positions: &[usize], hits: &[bool]| count_true(&gather(hits, positions));
    Ok(RepudiationCounts {
        bob_direct: count(&bob_keep, &bob_hits),
        bob_forwarded: count(&charlie_fwd, &charlie_hits),
        charlie_direct: count(&charlie_keep, &charlie_hits),
        charlie_forwarded: count(&bob_fwd, &bob_hits),
    })
}

/// One repudiation attempt: the sender plants latent mismatch indicators,
/// Bob verifies at s_a and Charlie at s_v. Success means Bob accepts while
/// Charlie rejects.
pub fn repudiation_trial<R: RngCore + ?Sized>(
    p_b: f64,
    p_c: f64,
    s_a: f64,
    s_v: f64,
    length: usize,
    rng: &mut R,
) -> Result<bool> {
    if !(s_v > s_a) {
        return Err(Error::InvalidParameter(format!(
            "s_v = {s_v} must exceed s_a = {s_a}"
        )));
    }
    let counts = repudiation_mismatch_counts(p_b, p_c, length, rng)?;
    let half = (length / 2) as f64;
    let bob_accepts =
        (counts.bob_direct as f64 / half) < s_a && (counts.bob_forwarded as f64 / half) < s_a;
    let charlie_rejects = (counts.charlie_direct as f64 / half) >= s_v
        || (counts.charlie_forwarded as f64 / half) >= s_v;
    Ok(bob_accepts && charlie_rejects)
}

/// One forging attempt: the forger causes no mismatches on the half he
/// himself forwarded to the victim and guesses each directly-received
/// element wrong with probability `mismatch_prob`. Success means the victim
/// accepts the forged declaration at threshold s_v.
pub fn forging_trial<R: RngCore + ?Sized>(
    mismatch_prob: f64,
    s_v: f64,
    length: usize,
    rng: &mut R,
) -> Result<bool> {
    validate_probability(mismatch_prob, "mismatch_prob")?;
    validate_probability(s_v, "s_v")?;
    if length == 0 || length % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "signature length {length} must be even and positive"
        )));
    }
    let half = length / 2;
    let direct_mismatches = (0..half).filter(|_| rng.random::<f64>() < mismatch_prob).count();
    let direct_ok = (direct_mismatches as f64 / half as f64) < s_v;
    let forwarded_ok = 0.0 < s_v;
    Ok(direct_ok && forwarded_ok)
}
