//! Per-bin cost-matrix analysis: estimate, error bars, decomposition, and
//! required signature lengths for each transmission sub-channel.

use serde::Serialize;

use cvqds::costmatrix::{subsample_errors, CostMatrix};
use cvqds::security::{length_with_errors, p_min, SignatureLength};
use cvqds::{eliminate, QuadratureRecord};

use crate::binning::Binning;
use crate::error::{CliError, Result};
use crate::records::Record;

/// Round to `digits` significant digits (report formatting only).
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = digits - 1 - x.abs().log10().floor() as i32;
    let factor = 10f64.powi(scale);
    (x * factor).round() / factor
}

fn round6(x: f64) -> f64 {
    round_sig(x, 6)
}

fn round6_matrix(m: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = round6(m[i][j]);
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct AnalyzeConfig {
    /// Unattenuated amplitude for p_min.
    pub alpha: f64,
    pub binning: Binning,
    /// Target failure probability for the length solver.
    pub target: f64,
    /// Bins with fewer samples get only the matrix and an insufficient flag.
    pub min_count: usize,
    /// Number of contiguous parts for the subsample error bars.
    pub parts: usize,
    /// Use this p_min instead of evaluating the eigenvalue formula at alpha.
    pub p_min_override: Option<f64>,
}

impl AnalyzeConfig {
    pub fn new(alpha: f64, binning: Binning, target: f64) -> Self {
        AnalyzeConfig {
            alpha,
            binning,
            target,
            min_count: 10_000,
            parts: 10,
            p_min_override: None,
        }
    }

    fn p_min(&self) -> f64 {
        self.p_min_override.unwrap_or_else(|| p_min(self.alpha))
    }
}

/// A required length in a report: a number, or the string marker for
/// degenerate (no-security) data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum LengthValue {
    Finite(u64),
    Marker(&'static str),
}

impl From<SignatureLength> for LengthValue {
    fn from(l: SignatureLength) -> Self {
        match l {
            SignatureLength::Finite(n) => LengthValue::Finite(n),
            SignatureLength::Unbounded => LengthValue::Marker("unbounded"),
        }
    }
}

/// Report for one transmission sub-channel. Probabilities carry 6
/// significant digits.
#[derive(Debug, Clone, Serialize)]
pub struct BinReport {
    pub alpha: f64,
    pub transmission_bin: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<[u64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<[[f64; 4]; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<[[f64; 4]; 4]>,
    pub bin_center: f64,
    pub samples: usize,
    pub insufficient: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub honest_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub advantage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length_best: Option<LengthValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<LengthValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length_worst: Option<LengthValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Whole-dataset analysis: per-bin reports plus ingestion bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub alpha: f64,
    pub p_min: f64,
    pub target: f64,
    pub n_bins: usize,
    pub t_lo: f64,
    pub t_hi: f64,
    pub min_count: usize,
    pub parts: usize,
    /// Records whose transmission fell outside the bin range.
    pub rejected_rows: usize,
    pub bins: Vec<BinReport>,
}

/// Sort records into transmission bins and run the full estimation pipeline
/// per bin. Component failures (too few records for error bars, a partition
/// missing a symbol) mark that bin and never abort the others.
pub fn analyze_bins(records: &[Record], cfg: &AnalyzeConfig) -> Result<AnalysisReport> {
    if !(cfg.target > 0.0 && cfg.target < 1.0) {
        return Err(CliError::Validation(format!(
            "target failure probability {} must lie in (0, 1)",
            cfg.target
        )));
    }
    if !(cfg.alpha > 0.0) && cfg.p_min_override.is_none() {
        return Err(CliError::Validation(
            "alpha must be positive to evaluate p_min".into(),
        ));
    }
    let p_min_value = cfg.p_min();

    let mut rejected = 0usize;
    let mut by_bin: Vec<Vec<&Record>> = vec![Vec::new(); cfg.binning.n_bins];
    for record in records {
        match cfg.binning.index(record.transmission) {
            Ok(bin) => by_bin[bin].push(record),
            Err(_) => rejected += 1,
        }
    }

    let bins = by_bin
        .iter()
        .enumerate()
        .filter(|(_, bucket)| !bucket.is_empty())
        .map(|(index, bucket)| analyze_one_bin(index, bucket, cfg, p_min_value))
        .collect();

    Ok(AnalysisReport {
        alpha: cfg.alpha,
        p_min: round6(p_min_value),
        target: cfg.target,
        n_bins: cfg.binning.n_bins,
        t_lo: cfg.binning.t_lo,
        t_hi: cfg.binning.t_hi,
        min_count: cfg.min_count,
        parts: cfg.parts,
        rejected_rows: rejected,
        bins,
    })
}

fn analyze_one_bin(
    index: usize,
    bucket: &[&Record],
    cfg: &AnalyzeConfig,
    p_min_value: f64,
) -> BinReport {
    let mut report = BinReport {
        alpha: cfg.alpha,
        transmission_bin: index,
        counts: None,
        c: None,
        e: None,
        bin_center: round6(cfg.binning.center(index)),
        samples: bucket.len(),
        insufficient: bucket.len() < cfg.min_count,
        p_min: None,
        honest_cost: None,
        advantage: None,
        c_min: None,
        g: None,
        length_best: None,
        length: None,
        length_worst: None,
        error: None,
    };

    let pairs: Vec<_> = bucket
        .iter()
        .map(|r| {
            let q = QuadratureRecord {
                x: r.x,
                p: r.p,
                transmission: r.transmission,
                sent: Some(r.sent),
            };
            (r.sent, eliminate(&q))
        })
        .collect();

    let matrix = match CostMatrix::estimate(&pairs) {
        Ok(m) => m,
        Err(err) => {
            report.error = Some(err.to_string());
            return report;
        }
    };
    report.counts = Some(matrix.row_counts());
    report.c = Some(round6_matrix(matrix.entries()));

    if report.insufficient {
        return report;
    }

    let errors = match subsample_errors(&pairs, cfg.parts) {
        Ok(e) => e,
        Err(err) => {
            report.error = Some(err.to_string());
            return report;
        }
    };
    report.e = Some(round6_matrix(&errors.e));

    let d = matrix.decompose();
    let c_min = matrix.min_cost_bound(p_min_value);
    report.p_min = Some(round6(p_min_value));
    report.honest_cost = Some(round6(d.honest_cost));
    report.advantage = Some(round6(d.advantage));
    report.c_min = Some(round6(c_min));
    report.g = Some(round6(c_min - d.honest_cost));

    match length_with_errors(&matrix, &errors, p_min_value, cfg.target) {
        Ok(triple) => {
            report.length_best = Some(triple.best.into());
            report.length = Some(triple.nominal.into());
            report.length_worst = Some(triple.worst.into());
        }
        Err(err) => report.error = Some(err.to_string()),
    }
    report
}
