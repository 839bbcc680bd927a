use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("candidate set is empty at step {step}")]
    ResolutionUnderflow { step: f64 },
    #[error("region is not curve-like: {0}")]
    NotCurve(String),
    #[error("image rasterization exceeded its cell budget ({cells} cells)")]
    UnboundedImage { cells: usize },
    #[error("no fiber sample within ball {ball} for level {level}")]
    FiberNotFound { ball: usize, level: f64 },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("Hoelder bound violated: d_Y = {image_distance} > C d_X^alpha = {bound} at pair ({i}, {j})")]
    HolderViolation { i: usize, j: usize, image_distance: f64, bound: f64 },
    #[error("map is constant on the sampled domain")]
    ConstantMap,
    #[error("no sign change of the fitted exponent over the probed exponents")]
    OutOfRange,
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
