//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (run with `--nocapture` to see them).
//!
//! Reference values marked "mpmath" were computed with a 40-digit
//! arbitrary-precision evaluation of the closed forms before the crate was
//! built and are frozen here.

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};

use rand::seq::SliceRandom;
use rand::Rng;

use cvqds::costmatrix::{reference, subsample_errors, CostMatrix, ErrorMatrix};
use cvqds::models::{AlphaPolicy, Model};
use cvqds::security::{
    failure_bound, forging_bound, lambdas, length_with_errors, p_min, repudiation_bound,
    required_length, robustness_bound, thresholds, SignatureLength,
};
use cvqds::{eliminate, sample_element, trial_rng, ChannelParams, PhaseIndex};
use cvqds_cli::analysis::{analyze_bins, AnalyzeConfig, LengthValue};
use cvqds_cli::binning::Binning;
use cvqds_cli::montecarlo::{run_monte_carlo, MonteCarloConfig, Scenario};
use cvqds_cli::records::Record;

fn criterion<F: FnOnce() + UnwindSafe>(number: u32, description: &str, body: F) {
    match catch_unwind(body) {
        Ok(()) => println!("criterion {number}: PASS - {description}"),
        Err(cause) => {
            println!("criterion {number}: FAIL - {description}");
            resume_unwind(cause);
        }
    }
}

#[test]
fn criterion_1_worked_example() {
    criterion(1, "worked-example reproduction (cost matrix to signature length)", || {
        let matrix = CostMatrix::from_probabilities(reference::COST).unwrap();
        let d = matrix.decompose();
        assert!((d.honest_cost - 0.38165).abs() <= 5e-5, "honest_cost {}", d.honest_cost);
        assert!((d.advantage - 0.0939).abs() <= 1e-12, "advantage {}", d.advantage);

        let c_min = matrix.min_cost_bound(reference::P_MIN);
        assert!((c_min - 0.42276).abs() <= 5e-5, "c_min {c_min}");
        let g = c_min - d.honest_cost;
        assert!((g - 0.04106).abs() <= 5e-5, "g {g}");

        // Full-precision pipeline: g = 0.0939 x 0.4373 = 0.04106247 gives
        // L = 93,977. The reference dataset quotes g rounded to 0.04106,
        // whose exact ceiling is L = 93,988, quoted in turn as 94,000. All
        // three agree within 0.02%.
        let l_pipeline = required_length(g, 1e-4).unwrap();
        assert_eq!(l_pipeline, 93_977);
        assert!((l_pipeline as f64 - 93_988.0).abs() / 93_988.0 <= 2e-4);
        let l_printed = required_length(0.04106, 1e-4).unwrap();
        assert_eq!(l_printed, 93_988);
        assert!((l_printed as f64 - 94_000.0).abs() / 94_000.0 <= 2e-4);
    });
}

#[test]
fn criterion_2_p_min_formula() {
    criterion(2, "p_min eigenvalue formula and trace identity", || {
        assert_eq!(p_min(0.0), 0.75);

        let mut rng = trial_rng(0xACC2, 0);
        for _ in 0..200 {
            let alpha = rng.random::<f64>() * 5.0;
            let sum = lambdas(alpha).sum();
            assert!((sum - 4.0).abs() <= 1e-10, "trace {sum} at alpha {alpha}");
        }

        // Direct evaluation: 0.4341633385048475 (mpmath). The reference
        // dataset quotes 0.4373 for the same amplitude; the discrepancy is
        // documented (the worked example takes 0.4373 as an input) and is
        // deliberately not asserted away.
        let p = p_min(0.48);
        assert!((p - 0.43416).abs() <= 1e-4, "p_min(0.48) = {p}");
        assert!((p - 0.4341633385048475).abs() <= 1e-12);
        assert!((p - reference::P_MIN).abs() > 1e-3, "0.4373 is not the formula value");
    });
}

#[test]
fn criterion_3_bound_identities() {
    criterion(3, "equal-risk exponent identities and length inversion", || {
        let mut rng = trial_rng(0xACC3, 0);
        for _ in 0..100 {
            let p_err = rng.random::<f64>() * 0.4;
            let g = rng.random::<f64>() * 0.3 + 1e-3;
            let c_min = p_err + g;
            let l = 1_000 + (rng.random::<f64>() * 100_000.0) as u64;
            let (s_a, s_v) = thresholds(p_err, c_min).unwrap();

            // All three exponents equal g^2 L / 16 under equal-risk
            // thresholds, so the bounds agree up to the prefactor.
            let fail = failure_bound(g, l).unwrap();
            let rep = repudiation_bound(s_a, s_v, l);
            let forg = forging_bound(c_min, s_v, l).unwrap();
            let rob = robustness_bound(p_err, s_a, l).unwrap();
            let tol = 1e-10 * fail.max(1e-300);
            assert!((rep - fail).abs() <= tol, "repudiation {rep} vs failure {fail}");
            assert!((rob - fail).abs() <= tol, "robustness {rob} vs failure {fail}");
            assert!(
                (2.0 * forg - fail).abs() <= tol || fail == 1.0,
                "forging {forg} vs failure {fail}"
            );

            // Inversion round-trip both ways.
            if fail > 1e-290 && fail < 1.0 {
                assert!(required_length(g, fail).unwrap() <= l);
            }
            let target = 10f64.powf(-2.0 - rng.random::<f64>() * 6.0);
            let l_req = required_length(g, target).unwrap();
            assert!(failure_bound(g, l_req).unwrap() <= target * (1.0 + 1e-9));
            if l_req > 1 {
                assert!(failure_bound(g, l_req - 1).unwrap() > target * (1.0 - 1e-9));
            }
        }
    });
}

#[test]
fn criterion_4_sampler_vs_closed_form() {
    criterion(4, "sampler sign-error grid and estimated matrix vs theory", || {
        // 5x5 (T, alpha) grid at 1e5 samples per point, 3 binomial sigma.
        let model = Model::ideal_het();
        let mut rng = trial_rng(0xACC4, 0);
        for &t in &[0.2, 0.4, 0.6, 0.8, 1.0] {
            for &alpha in &[0.2, 0.48, 0.8, 1.2, 2.0] {
                let ch = ChannelParams::ideal(t, alpha).unwrap();
                let p_err = model.perr(t, alpha).unwrap();
                let n = 100_000u64;
                let flips = (0..n)
                    .filter(|_| sample_element(PhaseIndex::K0, &ch, &mut rng).x < 0.0)
                    .count() as f64;
                let sigma = (p_err * (1.0 - p_err) / n as f64).sqrt();
                assert!(
                    (flips / n as f64 - p_err).abs() <= 3.0 * sigma,
                    "T={t} alpha={alpha}: rate {} vs p_err {p_err}",
                    flips / n as f64
                );
            }
        }

        // Estimated cost matrix vs the ideal theory matrix, entry-wise at
        // 1e6 samples.
        let t = 0.6;
        let alpha = 0.48;
        let ch = ChannelParams::ideal(t, alpha).unwrap();
        let theory = model.cost_matrix(t, alpha).unwrap();
        let n = 1_000_000usize;
        let records: Vec<_> = (0..n)
            .map(|i| {
                let k = PhaseIndex::ALL[i % 4];
                (k, eliminate(&sample_element(k, &ch, &mut rng)))
            })
            .collect();
        let estimated = CostMatrix::estimate(&records).unwrap();
        let row_n = (n / 4) as f64;
        for i in 0..4 {
            for j in 0..4 {
                let want = theory.get(i, j);
                let sigma = (want * (1.0 - want) / row_n).sqrt();
                assert!(
                    (estimated.get(i, j) - want).abs() <= (3.0 * sigma).max(1e-9),
                    "entry [{i}][{j}]: {} vs {want}",
                    estimated.get(i, j)
                );
            }
        }
    });
}

#[test]
fn criterion_5_hoeffding_bounds() {
    criterion(5, "empirical attack/failure rates below the Hoeffding bounds", || {
        // Repudiation at the worked example's equal-risk thresholds,
        // attacker at p = (s_a + s_v)/2, L = 200, 1e5 trials. The bound
        // saturates at 1 for a key this short; the sharp-threshold run
        // below exercises a bound well inside (0, 1).
        let matrix = CostMatrix::from_probabilities(reference::COST).unwrap();
        let d = matrix.decompose();
        let c_min = matrix.min_cost_bound(reference::P_MIN);
        let (s_a, s_v) = thresholds(d.honest_cost, c_min).unwrap();
        let p_attack = (s_a + s_v) / 2.0;
        let report = run_monte_carlo(&MonteCarloConfig {
            scenario: Scenario::Repudiate {
                p_b: p_attack,
                p_c: p_attack,
                s_a,
                s_v,
            },
            length: 200,
            trials: 100_000,
            seed: 0xACC5,
        })
        .unwrap();
        assert!(report.pass, "repudiation: CI {} vs bound {}", report.ci_upper, report.bound);

        let report = run_monte_carlo(&MonteCarloConfig {
            scenario: Scenario::Repudiate {
                p_b: 0.35,
                p_c: 0.35,
                s_a: 0.2,
                s_v: 0.5,
            },
            length: 200,
            trials: 100_000,
            seed: 0xACC5 + 1,
        })
        .unwrap();
        assert!(report.bound < 0.05, "sharp bound expected, got {}", report.bound);
        assert!(report.pass, "sharp repudiation: CI {} vs bound {}", report.ci_upper, report.bound);

        // Forging at mismatch_prob = C_min against the verification
        // threshold, L = 2000, 1e5 trials: bound exp(-(0.01028)^2 * 2000)
        // is ~0.81 and the empirical rate sits near 0.25.
        let report = run_monte_carlo(&MonteCarloConfig {
            scenario: Scenario::Forge {
                mismatch_prob: 0.42276,
                s_v: 0.41248,
            },
            length: 2000,
            trials: 100_000,
            seed: 0xACC5 + 2,
        })
        .unwrap();
        assert!(report.pass, "forging: CI {} vs bound {}", report.ci_upper, report.bound);
        assert!(report.bound < 1.0, "forging bound must not be vacuous");

        // Honest rejection, L = 500 and 1e4 trials: once at the in-scope
        // operating point (bound saturates at 1) and once at a high
        // amplitude where the bound is sharp.
        let model = Model::ideal_het();
        for (t, alpha, sharp) in [(0.6, 0.48, false), (1.0, 2.0, true)] {
            let p_err = model.perr(t, alpha).unwrap();
            let (s_a, _) = if sharp {
                (0.15, 0.0)
            } else {
                let c_min = p_err + model.g(t, alpha).unwrap();
                thresholds(p_err, c_min).unwrap()
            };
            let ch = model.channel_params(t, alpha).unwrap();
            let report = run_monte_carlo(&MonteCarloConfig {
                scenario: Scenario::Honest {
                    channel_bob: ch,
                    channel_charlie: ch,
                    s_a,
                    p_err,
                },
                length: 500,
                trials: 10_000,
                seed: 0xACC5 + 3,
            })
            .unwrap();
            if sharp {
                assert!(report.bound < 1e-3, "sharp robustness bound, got {}", report.bound);
            }
            assert!(
                report.pass,
                "honest T={t} alpha={alpha}: rejection {} vs bound {}",
                1.0 - report.rate,
                report.bound
            );
        }
    });
}

#[test]
fn criterion_6_model_curves() {
    criterion(6, "optimal amplitudes and model-curve ordering", || {
        let a_het = Model::ideal_het().optimal_alpha(1.0).unwrap();
        assert!((0.35..=0.65).contains(&a_het), "heterodyne alpha* {a_het}");
        let a_use = Model::ideal_use().optimal_alpha(1.0).unwrap();
        assert!((0.55..=0.85).contains(&a_use), "elimination alpha* {a_use}");

        let ts: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let het = Model::ideal_het()
            .length_curve(AlphaPolicy::Fixed(0.5), &ts, 1e-4)
            .unwrap();
        let use_curve = Model::ideal_use()
            .length_curve(AlphaPolicy::Optimal, &ts, 1e-4)
            .unwrap();
        let imperfect = Model::imperfect_het()
            .length_curve(AlphaPolicy::Fixed(0.5), &ts, 1e-4)
            .unwrap();
        for i in 0..ts.len() {
            let l_het = het[i].length.finite().expect("finite heterodyne length");
            let l_use = use_curve[i].length.finite().expect("finite elimination length");
            let l_imp = imperfect[i].length.finite().expect("finite imperfect length");
            assert!(l_het < l_use, "T={}: heterodyne {l_het} !< elimination {l_use}", ts[i]);
            assert!(l_imp >= l_het, "T={}: imperfect {l_imp} < ideal {l_het}", ts[i]);
        }
    });
}

#[test]
fn criterion_7_error_bar_ordering() {
    criterion(7, "length error bars ordered, degenerate data marked unbounded", || {
        let mut rng = trial_rng(0xACC7, 0);
        let mut saw_unbounded = false;
        for round in 0..200 {
            // Random matrix satisfying the row invariants.
            let mut entries = [[0.0; 4]; 4];
            for i in 0..4 {
                let diag: f64 = rng.random::<f64>() * 0.6;
                let near: f64 = rng.random();
                entries[i][i] = diag;
                entries[i][(i + 2) % 4] = 1.0 - diag;
                entries[i][(i + 1) % 4] = near;
                entries[i][(i + 3) % 4] = 1.0 - near;
            }
            let matrix = CostMatrix::from_probabilities(entries).unwrap();
            let mut e = [[0.0; 4]; 4];
            for row in e.iter_mut() {
                for v in row.iter_mut() {
                    *v = rng.random::<f64>() * 0.15;
                }
            }
            let errors = ErrorMatrix::new(e).unwrap();
            let p = 0.1 + rng.random::<f64>() * 0.6;
            let triple = length_with_errors(&matrix, &errors, p, 1e-4).unwrap();
            assert!(
                triple.best <= triple.nominal && triple.nominal <= triple.worst,
                "round {round}: {triple:?}"
            );
            if triple.worst == SignatureLength::Unbounded {
                saw_unbounded = true;
                assert!(triple.worst.finite().is_none());
            }
        }
        assert!(saw_unbounded, "error range should include degenerate draws");

        // Explicit degenerate case: errors wipe out the advantage entirely.
        let matrix = CostMatrix::from_probabilities(reference::COST).unwrap();
        let errors = ErrorMatrix::new([[0.06; 4]; 4]).unwrap();
        let triple = length_with_errors(&matrix, &errors, reference::P_MIN, 1e-4).unwrap();
        assert_eq!(triple.worst, SignatureLength::Unbounded);
        assert!(matches!(triple.nominal, SignatureLength::Finite(_)));
    });
}

/// Records whose elimination counts equal the reference matrix exactly:
/// the printed probabilities over 10,000 records per sent symbol, shuffled
/// within each symbol and interleaved so every contiguous tenth holds all
/// four symbols.
fn reference_records(transmission: f64, seed: u64) -> Vec<Record> {
    let per_row = 10_000usize;
    let mut per_symbol: Vec<Vec<(f64, f64)>> = Vec::new();
    for i in 0..4 {
        // x < 0 eliminates K0, x >= 0 eliminates K2; p < 0 eliminates K1,
        // p >= 0 eliminates K3.
        let n_e0 = (reference::COST[i][0] * per_row as f64).round() as usize;
        let n_e1 = (reference::COST[i][1] * per_row as f64).round() as usize;
        let mut xs: Vec<f64> = (0..per_row)
            .map(|j| if j < n_e0 { -1.0 } else { 1.0 })
            .collect();
        let mut ps: Vec<f64> = (0..per_row)
            .map(|j| if j < n_e1 { -1.0 } else { 1.0 })
            .collect();
        let mut rng = trial_rng(seed, i as u64);
        xs.shuffle(&mut rng);
        ps.shuffle(&mut rng);
        per_symbol.push(xs.into_iter().zip(ps).collect());
    }
    let mut records = Vec::with_capacity(4 * per_row);
    for j in 0..per_row {
        for (i, symbol) in per_symbol.iter().enumerate() {
            let (x, p) = symbol[j];
            records.push(Record {
                index: (j * 4 + i) as u64,
                transmission,
                x,
                p,
                sent: PhaseIndex::ALL[i],
            });
        }
    }
    records
}

#[test]
fn criterion_8_synthetic_bin_pipeline() {
    criterion(8, "theory curves plus end-to-end synthetic-bin pipeline", || {
        // The raw experimental channel data are not available, so the graph
        // content is covered by the theory-curve suite (criterion 6) and an
        // end-to-end run over synthetic records.

        // Exact reconstruction of the reference matrix through ingestion,
        // binning, estimation, decomposition, and the length solver.
        let records = reference_records(0.6, 0xACC8);
        let mut cfg = AnalyzeConfig::new(0.48, Binning::new(32, 0.0, 1.0).unwrap(), 1e-4);
        cfg.p_min_override = Some(reference::P_MIN);
        let report = analyze_bins(&records, &cfg).unwrap();
        assert_eq!(report.bins.len(), 1);
        let bin = &report.bins[0];
        assert_eq!(bin.transmission_bin, 19);
        assert_eq!(bin.counts.unwrap(), [10_000; 4]);
        assert!((bin.honest_cost.unwrap() - 0.38165).abs() <= 5e-5);
        assert_eq!(bin.advantage.unwrap(), 0.0939);
        assert!((bin.c_min.unwrap() - 0.42276).abs() <= 5e-5);
        assert!((bin.g.unwrap() - 0.04106).abs() <= 5e-5);
        assert_eq!(bin.length.unwrap(), LengthValue::Finite(93_977));
        match (bin.length_best.unwrap(), bin.length_worst.unwrap()) {
            (LengthValue::Finite(best), LengthValue::Finite(worst)) => {
                assert!(best < 93_977 && 93_977 < worst);
            }
            other => panic!("expected finite error bars, got {other:?}"),
        }

        // Simulated records at the same operating point converge to the
        // theory g within Monte Carlo tolerance.
        let t = 0.6;
        let alpha = 0.48;
        let ch = ChannelParams::ideal(t, alpha).unwrap();
        let mut rng = trial_rng(0xACC8, 99);
        let n = 400_000usize;
        let sim: Vec<Record> = (0..n)
            .map(|i| {
                let sent = PhaseIndex::ALL[i % 4];
                let q = sample_element(sent, &ch, &mut rng);
                Record {
                    index: i as u64,
                    transmission: t,
                    x: q.x,
                    p: q.p,
                    sent,
                }
            })
            .collect();
        let cfg = AnalyzeConfig::new(alpha, Binning::new(32, 0.0, 1.0).unwrap(), 1e-4);
        let report = analyze_bins(&sim, &cfg).unwrap();
        let bin = &report.bins[0];
        let g_theory = Model::ideal_het().g(t, alpha).unwrap();
        let sigma_entry = (0.25f64 / (n as f64 / 4.0)).sqrt();
        assert!(
            (bin.g.unwrap() - g_theory).abs() <= 3.0 * p_min(alpha) * sigma_entry,
            "pipeline g {} vs theory {g_theory}",
            bin.g.unwrap()
        );

        // Error bars behave like the worked example's: the worst case is
        // the longest length.
        let mats = subsample_errors(
            &records
                .iter()
                .map(|r| {
                    (
                        r.sent,
                        eliminate(&cvqds::QuadratureRecord {
                            x: r.x,
                            p: r.p,
                            transmission: r.transmission,
                            sent: Some(r.sent),
                        }),
                    )
                })
                .collect::<Vec<_>>(),
            10,
        )
        .unwrap();
        assert!(mats.e.iter().flatten().all(|&v| v >= 0.0));
    });
}
