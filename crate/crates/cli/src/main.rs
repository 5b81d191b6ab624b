//! Command-line front end: closed-form security quantities, per-bin cost
//! matrix analysis, theory curves, Monte Carlo runs, and synthetic record
//! generation.
//!
//! Exit codes: 0 success, 2 validation/input error, 3 no-security condition
//! (the forger's cost does not exceed the honest error rate).

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;

use cvqds::models::{AlphaPolicy, Model};
use cvqds::protocol::AdversaryConfig;
use cvqds::security::{lambdas, p_min, SecurityParams, SignatureLength};
use cvqds::{sample_element, trial_rng, PhaseIndex};

use cvqds_cli::analysis::{analyze_bins, round_sig, AnalyzeConfig, LengthValue};
use cvqds_cli::binning::Binning;
use cvqds_cli::error::CliError;
use cvqds_cli::fading::FadingModel;
use cvqds_cli::montecarlo::{run_monte_carlo, MonteCarloConfig, Scenario};
use cvqds_cli::records::{read_records, write_records, Record};

#[derive(Parser)]
#[command(
    name = "cvqds",
    version,
    about = "Quantum digital signatures over heterodyne measurements: security bounds, theory curves, and Monte Carlo verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    /// Ideal heterodyne detection.
    Ideal,
    /// Heterodyne with detector efficiency, preparation and electronic noise.
    Imperfect,
    /// Ideal unambiguous state elimination (single-photon baseline).
    Use,
}

/// Imperfection figures shared by the model-driven commands.
#[derive(Debug, Clone, Copy, clap::Args)]
struct ImperfectionArgs {
    /// Detection efficiency η (imperfect model).
    #[arg(long, default_value_t = cvqds::alphabet::DEFAULT_ETA)]
    eta: f64,
    /// Preparation excess variance ε (imperfect model).
    #[arg(long, default_value_t = cvqds::alphabet::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Electronic noise variance (imperfect model).
    #[arg(long, default_value_t = cvqds::alphabet::DEFAULT_ELECT)]
    elect: f64,
    /// alpha_x / alpha_p attenuation of the x-quadrature amplitude.
    #[arg(long, default_value_t = cvqds::alphabet::DEFAULT_ALPHA_RATIO)]
    alpha_ratio: f64,
}

impl ImperfectionArgs {
    fn model(&self, kind: ModelArg) -> Model {
        match kind {
            ModelArg::Ideal => Model::ideal_het(),
            ModelArg::Imperfect => {
                Model::imperfect_het_with(self.eta, self.epsilon, self.elect, self.alpha_ratio)
            }
            ModelArg::Use => Model::ideal_use(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Minimum state-misidentification probability and its eigenvalues.
    Pmin {
        /// Unattenuated coherent amplitude.
        #[arg(long)]
        alpha: f64,
    },
    /// Signature length and equal-risk thresholds for a given advantage g.
    Siglen {
        /// Advantage g = C_min - p_err.
        #[arg(long)]
        g: f64,
        /// Target failure probability.
        #[arg(long)]
        target: f64,
        /// Honest mismatch rate anchoring the thresholds.
        #[arg(long, default_value_t = 0.0)]
        perr: f64,
    },
    /// Per-transmission-bin cost matrices and lengths from a record file.
    Costmat {
        /// Input record CSV (header: index,transmission,x,p,sent).
        #[arg(long)]
        input: PathBuf,
        /// Unattenuated amplitude for p_min.
        #[arg(long)]
        alpha: f64,
        /// Number of transmission bins.
        #[arg(long, default_value_t = 32)]
        bins: usize,
        /// Target failure probability.
        #[arg(long)]
        target: f64,
        /// Output directory for per-bin JSON reports.
        #[arg(long)]
        out: PathBuf,
        /// Lower edge of the binned transmission range.
        #[arg(long, default_value_t = 0.0)]
        tmin: f64,
        /// Upper edge of the binned transmission range.
        #[arg(long, default_value_t = 1.0)]
        tmax: f64,
        /// Bins with fewer samples report only the matrix.
        #[arg(long, default_value_t = 10_000)]
        min_count: usize,
        /// Contiguous parts for the subsample error bars.
        #[arg(long, default_value_t = 10)]
        parts: usize,
        /// Override p_min instead of evaluating it at --alpha.
        #[arg(long)]
        pmin: Option<f64>,
    },
    /// Length-versus-transmission theory curves as CSV on stdout.
    Curves {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// "fixed:A" or "optimal"; defaults to fixed:0.5 for heterodyne
        /// models and optimal for unambiguous elimination.
        #[arg(long)]
        alpha_policy: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        tmin: f64,
        #[arg(long, default_value_t = 1.0)]
        tmax: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Target failure probability.
        #[arg(long)]
        target: f64,
        #[command(flatten)]
        imperfections: ImperfectionArgs,
    },
    /// Monte Carlo protocol trials against the analytic bounds.
    Simulate {
        /// "honest", "repudiate:pB,pC", or "forge:P".
        #[arg(long)]
        adversary: String,
        /// Signature half-length L (even).
        #[arg(long = "L")]
        length: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModelArg::Ideal)]
        model: ModelArg,
        /// Channel transmission (needed to derive thresholds or run honest trials).
        #[arg(long = "T")]
        transmission: Option<f64>,
        /// Unattenuated amplitude.
        #[arg(long)]
        alpha: Option<f64>,
        /// Authentication threshold override.
        #[arg(long)]
        sa: Option<f64>,
        /// Verification threshold override.
        #[arg(long)]
        sv: Option<f64>,
        #[command(flatten)]
        imperfections: ImperfectionArgs,
    },
    /// Generate a synthetic record CSV through a fading channel.
    Gen {
        #[arg(long, value_enum, default_value_t = ModelArg::Ideal)]
        model: ModelArg,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Unattenuated amplitude.
        #[arg(long)]
        alpha: f64,
        /// Constant channel transmission (shorthand for --fading constant:T).
        #[arg(long = "T")]
        transmission: Option<f64>,
        /// "constant:T", "uniform:LO,HI", or "empirical:C:W,C:W,...".
        #[arg(long)]
        fading: Option<String>,
        #[command(flatten)]
        imperfections: ImperfectionArgs,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Pmin { alpha } => cmd_pmin(alpha),
        Command::Siglen { g, target, perr } => cmd_siglen(g, target, perr),
        Command::Costmat {
            input,
            alpha,
            bins,
            target,
            out,
            tmin,
            tmax,
            min_count,
            parts,
            pmin,
        } => cmd_costmat(input, alpha, bins, target, out, tmin, tmax, min_count, parts, pmin),
        Command::Curves {
            model,
            alpha_policy,
            tmin,
            tmax,
            steps,
            target,
            imperfections,
        } => cmd_curves(model, alpha_policy, tmin, tmax, steps, target, imperfections),
        Command::Simulate {
            adversary,
            length,
            trials,
            seed,
            model,
            transmission,
            alpha,
            sa,
            sv,
            imperfections,
        } => cmd_simulate(
            &adversary,
            length,
            trials,
            seed,
            model,
            transmission,
            alpha,
            sa,
            sv,
            imperfections,
        ),
        Command::Gen {
            model,
            count,
            seed,
            out,
            alpha,
            transmission,
            fading,
            imperfections,
        } => cmd_gen(model, count, seed, out, alpha, transmission, fading, imperfections),
    }
}

fn cmd_pmin(alpha: f64) -> Result<(), CliError> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(CliError::Validation(format!(
            "alpha = {alpha} must be finite and >= 0"
        )));
    }
    let l = lambdas(alpha);
    println!("alpha = {alpha}");
    println!(
        "lambda = [{}, {}, {}, {}]",
        round_sig(l.l1, 6),
        round_sig(l.l2, 6),
        round_sig(l.l3, 6),
        round_sig(l.l4, 6)
    );
    println!("p_min = {}", round_sig(p_min(alpha), 6));
    Ok(())
}

fn cmd_siglen(g: f64, target: f64, perr: f64) -> Result<(), CliError> {
    if !(0.0..1.0).contains(&perr) {
        return Err(CliError::Validation(format!(
            "perr = {perr} must lie in [0, 1)"
        )));
    }
    let params = SecurityParams::derive(perr, perr + g, target)?;
    println!("g = {g}");
    println!("target = {target}");
    println!("L = {}", params.length);
    println!("total_2L = {}", 2 * params.length);
    println!("s_a = {}", round_sig(params.s_a, 6));
    println!("s_v = {}", round_sig(params.s_v, 6));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_costmat(
    input: PathBuf,
    alpha: f64,
    bins: usize,
    target: f64,
    out: PathBuf,
    tmin: f64,
    tmax: f64,
    min_count: usize,
    parts: usize,
    pmin_override: Option<f64>,
) -> Result<(), CliError> {
    let records = read_records(&input)?;
    let mut cfg = AnalyzeConfig::new(alpha, Binning::new(bins, tmin, tmax)?, target);
    cfg.min_count = min_count;
    cfg.parts = parts;
    cfg.p_min_override = pmin_override;
    let report = analyze_bins(&records, &cfg)?;

    fs::create_dir_all(&out).map_err(|source| CliError::Io {
        path: out.display().to_string(),
        source,
    })?;
    for bin in &report.bins {
        let path = out.join(format!("bin_{:02}.json", bin.transmission_bin));
        let json = serde_json::to_string_pretty(bin)?;
        fs::write(&path, json + "\n").map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    let summary_path = out.join("analysis.json");
    fs::write(&summary_path, serde_json::to_string_pretty(&report)? + "\n").map_err(|source| {
        CliError::Io {
            path: summary_path.display().to_string(),
            source,
        }
    })?;

    println!(
        "analyzed {} records into {} occupied bins ({} out of range)",
        records.len(),
        report.bins.len(),
        report.rejected_rows
    );
    for bin in &report.bins {
        let detail = if bin.insufficient {
            "insufficient data".to_string()
        } else if let Some(err) = &bin.error {
            format!("error: {err}")
        } else {
            format!(
                "g={} L={} [best {}, worst {}]",
                bin.g.unwrap(),
                show_length(bin.length),
                show_length(bin.length_best),
                show_length(bin.length_worst),
            )
        };
        println!(
            "bin {:02}: T={} samples={} {}",
            bin.transmission_bin, bin.bin_center, bin.samples, detail
        );
    }
    Ok(())
}

fn show_length(v: Option<LengthValue>) -> String {
    match v {
        Some(LengthValue::Finite(n)) => n.to_string(),
        Some(LengthValue::Marker(m)) => m.to_string(),
        None => "-".to_string(),
    }
}

fn parse_alpha_policy(spec: Option<&str>, model: ModelArg) -> Result<AlphaPolicy, CliError> {
    match spec {
        None => Ok(match model {
            ModelArg::Use => AlphaPolicy::Optimal,
            _ => AlphaPolicy::Fixed(0.5),
        }),
        Some("optimal") => Ok(AlphaPolicy::Optimal),
        Some(s) => match s.strip_prefix("fixed:") {
            Some(v) => {
                let alpha: f64 = v.parse().map_err(|_| {
                    CliError::Validation(format!("bad fixed alpha `{v}` in --alpha-policy"))
                })?;
                Ok(AlphaPolicy::Fixed(alpha))
            }
            None => Err(CliError::Validation(format!(
                "--alpha-policy must be `fixed:A` or `optimal`, got `{s}`"
            ))),
        },
    }
}

fn cmd_curves(
    model_arg: ModelArg,
    alpha_policy: Option<String>,
    tmin: f64,
    tmax: f64,
    steps: usize,
    target: f64,
    imperfections: ImperfectionArgs,
) -> Result<(), CliError> {
    if !(tmin > 0.0 && tmin <= tmax && tmax <= 1.0) {
        return Err(CliError::Validation(format!(
            "transmission range [{tmin}, {tmax}] must satisfy 0 < tmin <= tmax <= 1"
        )));
    }
    if steps == 0 {
        return Err(CliError::Validation("need at least one step".into()));
    }
    let policy = parse_alpha_policy(alpha_policy.as_deref(), model_arg)?;
    let model = imperfections.model(model_arg);
    let ts: Vec<f64> = if steps == 1 {
        vec![tmin]
    } else {
        (0..steps)
            .map(|i| tmin + (tmax - tmin) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    let curve = model.length_curve(policy, &ts, target)?;
    println!("T,L");
    for point in curve {
        let l = match point.length {
            SignatureLength::Finite(n) => n.to_string(),
            SignatureLength::Unbounded => "unbounded".to_string(),
        };
        println!("{},{}", round_sig(point.transmission, 6), l);
    }
    Ok(())
}

struct DerivedThresholds {
    s_a: f64,
    s_v: f64,
    p_err: f64,
}

/// Equal-risk thresholds from the theory model at (T, alpha); overrides win.
fn resolve_thresholds(
    model: &Model,
    transmission: Option<f64>,
    alpha: Option<f64>,
    sa: Option<f64>,
    sv: Option<f64>,
) -> Result<DerivedThresholds, CliError> {
    let derived = match (transmission, alpha) {
        (Some(t), Some(a)) => {
            let p_err = model.perr(t, a).map_err(CliError::Core)?;
            let c_min = p_err + model.g(t, a).map_err(CliError::Core)?;
            let (s_a, s_v) = cvqds::security::thresholds(p_err, c_min)?;
            Some(DerivedThresholds { s_a, s_v, p_err })
        }
        _ => None,
    };
    let need = |value: Option<f64>, derived_value: Option<f64>, name: &str| {
        value.or(derived_value).ok_or_else(|| {
            CliError::Validation(format!(
                "--{name} required (or pass --T and --alpha to derive it from the model)"
            ))
        })
    };
    let s_a = need(sa, derived.as_ref().map(|d| d.s_a), "sa")?;
    let s_v = need(sv, derived.as_ref().map(|d| d.s_v), "sv")?;
    let p_err = derived.as_ref().map(|d| d.p_err).unwrap_or(0.0);
    Ok(DerivedThresholds { s_a, s_v, p_err })
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    adversary: &str,
    length: usize,
    trials: u64,
    seed: u64,
    model_arg: ModelArg,
    transmission: Option<f64>,
    alpha: Option<f64>,
    sa: Option<f64>,
    sv: Option<f64>,
    imperfections: ImperfectionArgs,
) -> Result<(), CliError> {
    if model_arg == ModelArg::Use {
        return Err(CliError::Validation(
            "simulate drives the quadrature sampler; --model must be ideal or imperfect".into(),
        ));
    }
    let model = imperfections.model(model_arg);
    let config = parse_adversary(adversary)?;
    config.validate().map_err(CliError::Core)?;
    let scenario = match config {
        AdversaryConfig::HonestAll => {
            let (t, a) = match (transmission, alpha) {
                (Some(t), Some(a)) => (t, a),
                _ => {
                    return Err(CliError::Validation(
                        "honest runs need --T and --alpha".into(),
                    ))
                }
            };
            let resolved = resolve_thresholds(&model, Some(t), Some(a), sa, sv)?;
            let ch = model.channel_params(t, a).map_err(CliError::Core)?;
            Scenario::Honest {
                channel_bob: ch,
                channel_charlie: ch,
                s_a: resolved.s_a,
                p_err: resolved.p_err,
            }
        }
        AdversaryConfig::RepudiatingAlice { p_b, p_c } => {
            let resolved = resolve_thresholds(&model, transmission, alpha, sa, sv)?;
            Scenario::Repudiate {
                p_b,
                p_c,
                s_a: resolved.s_a,
                s_v: resolved.s_v,
            }
        }
        AdversaryConfig::ForgingBob { mismatch_prob } => {
            let resolved = resolve_thresholds(&model, transmission, alpha, sa.or(Some(0.0)), sv)?;
            Scenario::Forge {
                mismatch_prob,
                s_v: resolved.s_v,
            }
        }
    };

    let report = run_monte_carlo(&MonteCarloConfig {
        scenario,
        length,
        trials,
        seed,
    })?;
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

fn parse_adversary(spec: &str) -> Result<AdversaryConfig, CliError> {
    if spec == "honest" {
        return Ok(AdversaryConfig::HonestAll);
    }
    if let Some(rest) = spec.strip_prefix("repudiate:") {
        let (p_b, p_c) = parse_pair(rest, "repudiate:pB,pC")?;
        return Ok(AdversaryConfig::RepudiatingAlice { p_b, p_c });
    }
    if let Some(rest) = spec.strip_prefix("forge:") {
        let mismatch_prob: f64 = rest.parse().map_err(|_| {
            CliError::Validation(format!("bad forge mismatch probability `{rest}`"))
        })?;
        return Ok(AdversaryConfig::ForgingBob { mismatch_prob });
    }
    Err(CliError::Validation(format!(
        "--adversary must be `honest`, `repudiate:pB,pC`, or `forge:P`, got `{spec}`"
    )))
}

fn parse_pair(spec: &str, what: &str) -> Result<(f64, f64), CliError> {
    let mut parts = spec.split(',');
    let err = || CliError::Validation(format!("expected `{what}`, got `{spec}`"));
    let a: f64 = parts.next().ok_or_else(err)?.parse().map_err(|_| err())?;
    let b: f64 = parts.next().ok_or_else(err)?.parse().map_err(|_| err())?;
    if parts.next().is_some() {
        return Err(err());
    }
    Ok((a, b))
}

fn parse_fading(
    fading: Option<&str>,
    transmission: Option<f64>,
) -> Result<FadingModel, CliError> {
    let model = match (fading, transmission) {
        (Some(spec), None) => {
            if let Some(v) = spec.strip_prefix("constant:") {
                FadingModel::Constant(v.parse().map_err(|_| {
                    CliError::Validation(format!("bad constant transmission `{v}`"))
                })?)
            } else if let Some(v) = spec.strip_prefix("uniform:") {
                let (lo, hi) = parse_pair(v, "uniform:LO,HI")?;
                FadingModel::Uniform { lo, hi }
            } else if let Some(v) = spec.strip_prefix("empirical:") {
                let mut bins = Vec::new();
                for part in v.split(',') {
                    let mut halves = part.split(':');
                    let bad =
                        || CliError::Validation(format!("bad empirical bin `{part}`"));
                    let center: f64 =
                        halves.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                    let weight: f64 =
                        halves.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                    if halves.next().is_some() {
                        return Err(bad());
                    }
                    bins.push((center, weight));
                }
                FadingModel::Empirical(bins)
            } else {
                return Err(CliError::Validation(format!(
                    "--fading must be `constant:T`, `uniform:LO,HI`, or `empirical:C:W,...`, got `{spec}`"
                )));
            }
        }
        (None, Some(t)) => FadingModel::Constant(t),
        (None, None) => {
            return Err(CliError::Validation(
                "record generation needs --T or --fading".into(),
            ))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Validation(
                "--T and --fading are mutually exclusive".into(),
            ))
        }
    };
    model.validate()?;
    Ok(model)
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    model_arg: ModelArg,
    count: usize,
    seed: u64,
    out: PathBuf,
    alpha: f64,
    transmission: Option<f64>,
    fading: Option<String>,
    imperfections: ImperfectionArgs,
) -> Result<(), CliError> {
    if model_arg == ModelArg::Use {
        return Err(CliError::Validation(
            "record generation drives the quadrature sampler; --model must be ideal or imperfect"
                .into(),
        ));
    }
    let model = imperfections.model(model_arg);
    let fading = parse_fading(fading.as_deref(), transmission)?;

    // One stream; per record: transmission, sent symbol, then x and p.
    let mut rng = trial_rng(seed, 0);
    let mut records = Vec::with_capacity(count);
    for index in 0..count {
        let t = fading.sample(&mut rng);
        let sent = PhaseIndex::ALL[rng.random_range(0..4usize)];
        let ch = model.channel_params(t, alpha).map_err(CliError::Core)?;
        let q = sample_element(sent, &ch, &mut rng);
        records.push(Record {
            index: index as u64,
            transmission: t,
            x: q.x,
            p: q.p,
            sent,
        });
    }
    write_records(&out, &records)?;
    println!("wrote {} records to {}", records.len(), out.display());
    Ok(())
}
