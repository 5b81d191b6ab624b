//! Harness around the `cvqds` library: fading-channel record generation,
//! transmission binning, record-file ingestion, per-bin cost-matrix
//! analysis, and Monte Carlo bound verification.

pub mod analysis;
pub mod binning;
pub mod error;
pub mod fading;
pub mod montecarlo;
pub mod records;

pub use analysis::{analyze_bins, AnalysisReport, AnalyzeConfig, BinReport};
pub use binning::Binning;
pub use error::{CliError, Result, RowProblem};
pub use fading::FadingModel;
pub use montecarlo::{run_monte_carlo, MonteCarloConfig, Scenario, TrialReport};
pub use records::{format_records, parse_records, read_records, write_records, Record};
