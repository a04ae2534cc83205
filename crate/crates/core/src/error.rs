use thiserror::Error;

/// Errors produced by the estimators and the verification harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("value {value} is outside the range [0, {max}] of the gauge")]
    OutOfRange { value: f64, max: f64 },

    #[error("inadmissible gauge: {0}")]
    Inadmissible(String),

    #[error("segments {first} and {second} intersect")]
    SelfIntersection { first: usize, second: usize },

    #[error("segment {index} has slope {slope} exceeding the bound {bound}")]
    SlopeViolation { index: usize, slope: f64, bound: f64 },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("charge at distance {distance:e} from the sphere of radius {radius} (required at least {required:e})")]
    ChargeTooClose {
        distance: f64,
        radius: f64,
        required: f64,
    },

    #[error("empty set")]
    EmptySet,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
