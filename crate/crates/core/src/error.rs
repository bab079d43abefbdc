use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row} has {found} values, expected {expected}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("rows {first} and {second} are identical in all dimensions")]
    DuplicateTuple { first: usize, second: usize },
    #[error("relation is empty")]
    EmptyRelation,
    #[error("relation needs at least one dimension")]
    NoDimensions,
    #[error("query has {found} windows, index has {expected} dimensions")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate window [{lower}, {upper}] in dimension {dim}")]
    DegenerateWindow { dim: usize, lower: i128, upper: i128 },
    #[error("value {value} does not fit the {bits}-bit payload of an index word")]
    CapacityExceeded { value: u64, bits: u32 },
    #[error("invalid cardinality {0}, must be >= 1")]
    InvalidCardinality(f64),
    #[error("invalid occupancy arguments: {urns} urns, {balls} balls")]
    InvalidArgs { urns: f64, balls: f64 },
    #[error("invalid prediction input: {0}")]
    InvalidInput(String),
    #[error("invalid bucket count {buckets} for {len} values")]
    InvalidBucketCount { buckets: usize, len: usize },
    #[error("probabilities sum to {0}, expected 1")]
    PmfNotNormalized(f64),
    #[error("invalid column spec: {0}")]
    InvalidSpec(String),
    #[error("column {column} is correlated with column {base}, which does not precede it")]
    SpecOrder { column: usize, base: usize },
    #[error("regression needs at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("regressor has zero variance")]
    DegenerateDesign,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("actual value at position {0} is zero")]
    ZeroActual(usize),
    #[error("monotonic clock unavailable")]
    ClockUnavailable,
    #[error("example {index}: {source}")]
    Example {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("malformed index dump: {0}")]
    Format(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_example(self, index: usize) -> Self {
        Error::Example {
            index,
            source: Box::new(self),
        }
    }
}
