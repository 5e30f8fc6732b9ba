use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("n = {n} outside supported range 1..={max}")]
    PartitionBound { n: usize, max: usize },
    #[error("k = {k} outside 1..={n}")]
    BlockCountBound { k: usize, n: usize },
    #[error("partition count for n = {n} overflows u64")]
    CountOverflow { n: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid ground space: {0}")]
    InvalidGround(String),
    #[error("point {0} does not lie in the ground space")]
    PointOutsideGround(String),
    #[error("configuration has {len} points, subset enumeration supports at most {max}")]
    SubsetOverflow { len: usize, max: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("kernel spectrum violation: eigenvalue {eigenvalue} exceeds 1 - {margin} (or is negative)")]
    SpectrumViolation { eigenvalue: f64, margin: f64 },
    #[error("conditioning on a configuration of zero weight")]
    DegenerateConfiguration,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("shift is not injective on the configuration (two points map to {0})")]
    NonInjective(String),
    #[error("shift inverse could not be evaluated at {0}")]
    InverseFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
