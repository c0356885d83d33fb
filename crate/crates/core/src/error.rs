use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid stable parameters: {0}")]
    InvalidParams(String),
    #[error("linear transform with a = 0 gives a degenerate distribution")]
    ZeroScale,
    #[error("cannot sum stable laws with different stability indices ({0} vs {1})")]
    AlphaMismatch(f64, f64),
    #[error("sum of an empty list of stable laws")]
    EmptySum,
    #[error("probability {0} is outside (0, 1)")]
    InvalidProbability(f64),
    #[error("quantile levels must satisfy 0 < p1 < p2 < 1, got ({0}, {1})")]
    InvalidLevels(f64, f64),
    #[error("invalid MA model: {0}")]
    InvalidModel(String),
    #[error("aggregation level must be at least {min}, got {r}")]
    AggregationLevel { r: f64, min: f64 },
    #[error("series of length {len} is shorter than the aggregation window {r}")]
    SeriesTooShort { len: usize, r: usize },
    #[error("closed-form LQD does not hold: neither beta = 0 nor the partial-sum condition is satisfied")]
    ConditionsNotSatisfied,
    #[error("r|sum theta|^alpha + g_alpha(theta) = {0} is not positive")]
    NonPositiveArgument(f64),
    #[error("invalid raster grid: {0}")]
    DegenerateGrid(String),
    #[error("alpha = {0} outside the supported range {1}")]
    AlphaOutOfRange(f64, &'static str),
    #[error("sample of size {len} is below the minimum {min}")]
    SampleTooSmall { len: usize, min: usize },
    #[error("empirical quantile spread {0} is not positive")]
    NonPositiveSpread(f64),
    #[error("quantile inversion failed to bracket p = {0}")]
    Bracket(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
