//! Elimination cost matrices and the minimum-cost forger bound.
//!
//! A cost matrix tabulates P(state j eliminated | state i sent) over the four
//! symbols. For heterodyne elimination every measurement removes exactly one
//! state per quadrature, so each row sums to 2 and the two antipodal pairs
//! each sum to 1 within a row.
//!
//! The forger's minimum cost is lower-bounded by splitting the matrix into a
//! constant-row part (the honest cost C^h = ¼·Σᵢ c[i][i], which shifts the
//! cost of every measurement) and an error-type remainder whose minimum cost
//! is the smallest off-diagonal advantage times the minimum misidentification
//! probability p_min:
//!
//! ```text
//! C_min ≥ C^h + advantage · p_min,    advantage = min_{i≠j} (c[i][j] − c[i][i])
//! ```

use crate::alphabet::{EliminationPair, PhaseIndex};
use crate::error::{Error, Result};

const ROW_TOLERANCE: f64 = 1e-9;

/// 4×4 elimination-probability table, rows indexed by sent symbol and
/// columns by eliminated symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    entries: [[f64; 4]; 4],
    /// Per-row sample counts; zero for analytic (closed-form) matrices.
    row_counts: [u64; 4],
    /// Perturbed matrices are bound inputs, not probability tables, and are
    /// not required to satisfy the row invariants.
    relaxed: bool,
}

impl CostMatrix {
    /// Estimate from (sent, eliminated) calibration records.
    ///
    /// Counting is exact integer arithmetic; probabilities are formed only on
    /// access, so c[i][i] + c[i][i+2] = 1 and c[i][i+1] + c[i][i+3] = 1 hold
    /// by construction.
    pub fn estimate(records: &[(PhaseIndex, EliminationPair)]) -> Result<Self> {
        let (counts, rows) = count_eliminations(records);
        for (i, &n) in rows.iter().enumerate() {
            if n == 0 {
                return Err(Error::MissingSymbol(i as u8));
            }
        }
        let mut entries = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                entries[i][j] = counts[i][j] as f64 / rows[i] as f64;
            }
        }
        Ok(CostMatrix {
            entries,
            row_counts: rows,
            relaxed: false,
        })
    }

    /// Build from a probability table, enforcing entry range and both row
    /// invariants (within floating tolerance).
    pub fn from_probabilities(entries: [[f64; 4]; 4]) -> Result<Self> {
        validate_entry_range(&entries)?;
        for (i, row) in entries.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 2.0).abs() > ROW_TOLERANCE {
                return Err(Error::InvalidCostMatrix(format!(
                    "row {i} sums to {sum}, expected 2"
                )));
            }
            for (a, b) in [(i, (i + 2) % 4), ((i + 1) % 4, (i + 3) % 4)] {
                let pair = row[a] + row[b];
                if (pair - 1.0).abs() > ROW_TOLERANCE {
                    return Err(Error::InvalidCostMatrix(format!(
                        "row {i}: entries {a} and {b} sum to {pair}, expected 1"
                    )));
                }
            }
        }
        Ok(CostMatrix {
            entries,
            row_counts: [0; 4],
            relaxed: false,
        })
    }

    /// Build from entries that need not satisfy the row invariants (e.g. the
    /// unambiguous-elimination theory matrix, or any perturbed matrix). Only
    /// the [0, 1] entry range is enforced.
    pub fn from_probabilities_relaxed(entries: [[f64; 4]; 4]) -> Result<Self> {
        validate_entry_range(&entries)?;
        Ok(CostMatrix {
            entries,
            row_counts: [0; 4],
            relaxed: true,
        })
    }

    pub fn entry(&self, sent: PhaseIndex, eliminated: PhaseIndex) -> f64 {
        self.entries[sent.index()][eliminated.index()]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn entries(&self) -> &[[f64; 4]; 4] {
        &self.entries
    }

    pub fn row_counts(&self) -> [u64; 4] {
        self.row_counts
    }

    /// True when the matrix is a bound input that skipped row validation.
    pub fn is_relaxed(&self) -> bool {
        self.relaxed
    }

    /// Split into honest cost and the minimum off-diagonal advantage.
    pub fn decompose(&self) -> Decomposition {
        let honest_cost = (0..4).map(|i| self.entries[i][i]).sum::<f64>() / 4.0;
        let advantage = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.entries[i][j] - self.entries[i][i])
            .fold(f64::INFINITY, f64::min);
        Decomposition {
            honest_cost,
            advantage,
        }
    }

    /// Lower bound on the forger's minimum cost, C^h + max(advantage, 0)·p_min.
    ///
    /// A non-positive advantage (degenerate data) clamps to the honest cost:
    /// the forger can always do at least as well as guessing.
    pub fn min_cost_bound(&self, p_min: f64) -> f64 {
        let d = self.decompose();
        d.honest_cost + d.advantage.max(0.0) * p_min
    }

    /// Shift every entry by its statistical error, diagonal and off-diagonal
    /// in opposite directions, clamping to [0, 1]. `Worst` shrinks the
    /// advantage (longest signature), `Best` grows it.
    pub fn perturb(&self, errors: &ErrorMatrix, direction: PerturbDirection) -> CostMatrix {
        let sign = match direction {
            PerturbDirection::Worst => 1.0,
            PerturbDirection::Best => -1.0,
        };
        let mut entries = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let delta = if i == j { sign } else { -sign } * errors.e[i][j];
                entries[i][j] = (self.entries[i][j] + delta).clamp(0.0, 1.0);
            }
        }
        CostMatrix {
            entries,
            row_counts: self.row_counts,
            relaxed: true,
        }
    }
}

fn validate_entry_range(entries: &[[f64; 4]; 4]) -> Result<()> {
    for (i, row) in entries.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidCostMatrix(format!(
                    "entry [{i}][{j}] = {v} outside [0, 1]"
                )));
            }
        }
    }
    Ok(())
}

/// Exact elimination counts: counts[i][j] = number of records with sent = i
/// that eliminated j, rows[i] = number of records with sent = i.
pub fn count_eliminations(
    records: &[(PhaseIndex, EliminationPair)],
) -> ([[u64; 4]; 4], [u64; 4]) {
    let mut counts = [[0u64; 4]; 4];
    let mut rows = [0u64; 4];
    for &(sent, pair) in records {
        let i = sent.index();
        rows[i] += 1;
        counts[i][pair.elim_x.index()] += 1;
        counts[i][pair.elim_p.index()] += 1;
    }
    (counts, rows)
}

/// Entry-wise standard deviations of a cost matrix across data subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMatrix {
    pub e: [[f64; 4]; 4],
}

impl ErrorMatrix {
    pub fn zeros() -> Self {
        ErrorMatrix { e: [[0.0; 4]; 4] }
    }

    pub fn new(e: [[f64; 4]; 4]) -> Result<Self> {
        for row in &e {
            for &v in row {
                if v < 0.0 || !v.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "error matrix entries must be finite and >= 0, got {v}"
                    )));
                }
            }
        }
        Ok(ErrorMatrix { e })
    }
}

/// Estimate entry-wise statistical errors by splitting the records into
/// `parts` contiguous equal-size chunks, estimating a cost matrix on each,
/// and taking the population standard deviation per entry.
///
/// Contiguous (rather than shuffled) chunks deliberately pick up slow drifts
/// in the data. Records beyond `parts · (len / parts)` are ignored.
pub fn subsample_errors(
    records: &[(PhaseIndex, EliminationPair)],
    parts: usize,
) -> Result<ErrorMatrix> {
    if parts == 0 || records.len() < parts {
        return Err(Error::TooFewRecords {
            records: records.len(),
            parts,
        });
    }
    let chunk = records.len() / parts;
    let mut matrices = Vec::with_capacity(parts);
    for p in 0..parts {
        let slice = &records[p * chunk..(p + 1) * chunk];
        let m = CostMatrix::estimate(slice).map_err(|err| match err {
            Error::MissingSymbol(s) => Error::PartitionMissingSymbol { part: p, symbol: s },
            other => other,
        })?;
        matrices.push(m);
    }
    let mut e = [[0.0; 4]; 4];
    let n = parts as f64;
    for i in 0..4 {
        for j in 0..4 {
            let mean = matrices.iter().map(|m| m.get(i, j)).sum::<f64>() / n;
            let var = matrices
                .iter()
                .map(|m| (m.get(i, j) - mean).powi(2))
                .sum::<f64>()
                / n;
            e[i][j] = var.sqrt();
        }
    }
    Ok(ErrorMatrix { e })
}

/// Constant-row / error-type split of a cost matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    /// C^h = ¼·Σᵢ c[i][i]: the probability an honest recipient eliminates the
    /// sent state.
    pub honest_cost: f64,
    /// Smallest margin by which declaring the sent state beats declaring any
    /// other; negative for degenerate data, in which case no security is
    /// derivable.
    pub advantage: f64,
}

impl Decomposition {
    pub fn is_degenerate(&self) -> bool {
        self.advantage <= 0.0
    }
}

/// Direction of the error-bar perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbDirection {
    /// Diagonal up, off-diagonal down: smallest advantage, longest signature.
    Worst,
    /// Diagonal down, off-diagonal up: largest advantage, shortest signature.
    Best,
}

/// The measured cost matrix and its error matrix for α = 0.48 at T = 0.600
/// (the worked example used throughout the tests).
pub mod reference {
    pub const COST: [[f64; 4]; 4] = [
        [0.3767, 0.5028, 0.6233, 0.4972],
        [0.4929, 0.3682, 0.5071, 0.6318],
        [0.5979, 0.496, 0.4021, 0.504],
        [0.4957, 0.6204, 0.5043, 0.3796],
    ];
    pub const ERRORS: [[f64; 4]; 4] = [
        [0.015, 0.019, 0.015, 0.019],
        [0.008, 0.013, 0.008, 0.013],
        [0.013, 0.019, 0.013, 0.019],
        [0.014, 0.020, 0.014, 0.020],
    ];
    /// p_min quoted alongside the matrix (for α = 0.48).
    pub const P_MIN: f64 = 0.4373;
}
