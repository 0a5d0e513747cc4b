use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polygon has no edges")]
    EmptyPolygon,

    #[error("edge {index} has non-positive or non-finite length {length}")]
    InvalidEdgeLength { index: usize, length: f64 },

    #[error("boundary does not close: gap ({dx:.3e}, {dy:.3e}) exceeds {tol:.3e}")]
    OpenBoundary { dx: f64, dy: f64, tol: f64 },

    #[error("edges {first} and {second} intersect")]
    SelfIntersecting { first: usize, second: usize },

    #[error("boundary is not counterclockwise (signed area {area:.3e})")]
    NotCounterClockwise { area: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid speed {0}: must be positive and finite")]
    InvalidSpeed(f64),

    #[error("no sensor detected the target")]
    NoDetection,

    #[error("expected detection count {0} is not positive")]
    InvalidExpectation(f64),

    #[error("edge direction pair is not a concave vertex")]
    NotConcave,

    #[error("estimation is degenerate: {0}")]
    Degenerate(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("malformed record at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
