use thiserror::Error;

/// A configuration that violates one of the method's hypotheses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{name} = {value} must lie strictly inside (0, 1)")]
    EpsilonOutOfRange { name: &'static str, value: f64 },
    #[error("delta = {0} must lie strictly inside (0, 1)")]
    DeltaOutOfRange(f64),
    #[error("interval [{a}, {b}] is empty: a must be < b")]
    EmptyInterval { a: f64, b: f64 },
    #[error("interval bounds must be finite, got [{a}, {b}]")]
    NonFiniteBound { a: f64, b: f64 },
    #[error("lower bound a = {0} must be >= 0")]
    NegativeLowerBound(f64),
    #[error("relative error criterion requires a > 0, got a = {0}")]
    RelativeWithZeroLowerBound(f64),
}

/// Failure of the sample-size search.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("no sample size in [{start_n}, {max_n}] reaches the requested confidence")]
    MaxSampleSizeExceeded { start_n: u64, max_n: u64 },
    #[error("invalid search options: {0}")]
    InvalidOptions(&'static str),
}
