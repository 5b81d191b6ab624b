//! Numeric primitives shared by the simulation and bound machinery.
//!
//! Gaussian sampling goes through an explicit inverse-CDF transform rather
//! than a rejection method: one uniform draw maps to exactly one normal
//! variate, so the draw count per sampled element is fixed and seeded runs
//! consume the random stream identically everywhere.

use rand::RngCore;
pub use statrs::function::erf::erfc;

/// Map a raw 64-bit word to the open interval (0, 1).
///
/// Uses the top 52 bits offset by half a step: (i + 0.5) / 2^52. With i
/// below 2^52 the sum is exactly representable, so the result lies in
/// [2^-53, 1 − 2^-53] and `inverse_normal_cdf` stays finite.
pub fn uniform_open01(word: u64) -> f64 {
    ((word >> 12) as f64 + 0.5) * (1.0 / 4503599627370496.0)
}

/// Draw one standard normal variate from `rng` by inverse CDF (one `u64`
/// consumed per call).
pub fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    inverse_normal_cdf(uniform_open01(rng.next_u64()))
}

/// Probability that a Gaussian with mean `mu` and variance `var` lands on the
/// opposite side of zero from its mean: ½·erfc(|μ| / √(2·var)).
///
/// For μ = 0 this is exactly ½ (a fair coin on the outcome sign).
pub fn sign_error_probability(mu: f64, var: f64) -> f64 {
    if mu == 0.0 {
        return 0.5;
    }
    0.5 * erfc(mu.abs() / (2.0 * var).sqrt())
}

/// Inverse of the standard normal CDF (Wichura's AS 241, PPND16 variant).
///
/// Accurate to about 1 ulp over (0, 1); the tails below ~1e-300 saturate to
/// ±∞, which `uniform_open01` can never produce.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0, "p must lie strictly in (0,1)");

    const A: [f64; 8] = [
        3.387_132_872_796_366_608e0,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34e0,
        4.630_337_846_156_545_295_9e0,
        5.769_497_221_460_691_405_5e0,
        3.647_848_324_763_204_605_04e0,
        1.270_458_252_452_368_382_58e0,
        2.417_807_251_774_506_117_7e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_4e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87e0,
        1.676_384_830_183_803_849_4e0,
        6.897_673_349_851_000_045_5e-1,
        1.481_039_764_274_800_745_9e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_2e0,
        5.463_784_911_164_114_369_9e0,
        1.784_826_539_917_291_335_8e0,
        2.965_605_718_285_048_912_3e-1,
        2.653_218_952_657_612_309_3e-2,
        1.242_660_947_388_078_438_6e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_9e-1,
        1.369_298_809_227_358_053_1e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591e-4,
        1.846_318_317_510_054_681_8e-5,
        1.421_511_758_316_445_888_7e-7,
        2.044_263_103_389_939_785_64e-15,
    ];

    fn ratio(num: &[f64; 8], den: &[f64; 8], r: f64) -> f64 {
        let mut n = num[7];
        let mut d = den[7];
        for i in (0..7).rev() {
            n = n * r + num[i];
            d = d * r + den[i];
        }
        n / d
    }

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * ratio(&A, &B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let z = if r <= 5.0 {
        ratio(&C, &D, r - 1.6)
    } else {
        ratio(&E, &F, r - 5.0)
    };
    if q < 0.0 {
        -z
    } else {
        z
    }
}
