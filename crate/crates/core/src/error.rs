//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by alphabet, cost-matrix, security, model, and protocol
/// operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A phase symbol outside {0, 1, 2, 3}.
    #[error("invalid phase symbol {0}: must be one of 0, 1, 2, 3")]
    InvalidPhase(u64),

    /// A channel or configuration parameter outside its valid range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Cost-matrix estimation saw no records for one of the sent symbols.
    #[error("no records with sent symbol {0}; every row needs at least one sample")]
    MissingSymbol(u8),

    /// Too few records to split into the requested number of parts.
    #[error("cannot split {records} records into {parts} parts")]
    TooFewRecords { records: usize, parts: usize },

    /// A subsample partition is missing one of the four sent symbols.
    #[error("partition {part} has no records with sent symbol {symbol}")]
    PartitionMissingSymbol { part: usize, symbol: u8 },

    /// A probability table entry outside [0, 1] or violating a row invariant.
    #[error("invalid cost matrix: {0}")]
    InvalidCostMatrix(String),

    /// The security gap is non-positive: the forger is at least as good as an
    /// honest party and no finite signature length helps.
    #[error("no security margin: {0}")]
    NoSecurity(String),

    /// A verification half with no elements cannot certify anything.
    #[error("signature half `{0}` is empty; cannot verify")]
    EmptySignatureHalf(&'static str),

    /// Operation undefined for the requested model kind.
    #[error("operation not defined for model {0}")]
    UnsupportedModel(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
