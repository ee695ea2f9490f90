use thiserror::Error;

/// Errors raised by the toolkit's operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid interval [{lo}, {hi}] (lo_open={lo_open}, hi_open={hi_open})")]
    InvalidInterval {
        lo: f64,
        hi: f64,
        lo_open: bool,
        hi_open: bool,
    },
    #[error("complement requires a universe box")]
    MissingUniverse,
    #[error("operands carry different universes")]
    UniverseMismatch,
    #[error("unbounded input: {0}")]
    Unbounded(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("point is not a member of the set value at the anchor")]
    AnchorNotInSet,
    #[error("the convex strategy requires a plot built by interval_map")]
    NotIntervalMap,
    #[error("measure of the restricting set must be finite and positive, got {0}")]
    DegenerateMeasure(f64),
    #[error("functional undefined along path at t = {t}")]
    UndefinedAlongPath { t: f64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("polygon is not simple: edges {0} and {1} cross")]
    SelfIntersection(usize, usize),
    #[error("polygon must be counterclockwise (signed area {0})")]
    Orientation(f64),
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
