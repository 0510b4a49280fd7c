use std::fmt;

use thiserror::Error;

/// Broad error class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Parse,
    Config,
    Analysis,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Parse => 2,
            Category::Config => 3,
            Category::Analysis => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Parse => "parse",
            Category::Config => "config",
            Category::Analysis => "analysis",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}: row {row}, column {column}: {message}")]
    Parse {
        source_name: String,
        row: usize,
        column: usize,
        message: String,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid plate spec: {0}")]
    InvalidSpec(String),
    #[error("unknown accuracy class {0}% (expected 10, 5 or 1)")]
    UnknownAccuracyClass(f64),
    #[error("invalid amplifier config: {0}")]
    InvalidAmplifier(String),

    #[error("channel `{0}` not present")]
    ChannelMissing(String),
    #[error("invalid time series: {0}")]
    InvalidSeries(String),
    #[error("no spectral peak: max/median magnitude ratio {ratio:.3} below {required}")]
    NoPeak { ratio: f64, required: f64 },
    #[error("too few envelope peaks above the noise floor: found {found}, need {required}")]
    TooFewPeaks { found: usize, required: usize },
    #[error("envelope does not decay (fitted decay constant {lambda:.3e} 1/s)")]
    NonDecayingEnvelope { lambda: f64 },

    #[error(
        "protocol mismatch: found {preloads} preload plateaus, {ramps_up} up-ramps, {ramps_down} down-ramps (expected 2/2/2)"
    )]
    ProtocolMismatch {
        preloads: usize,
        ramps_up: usize,
        ramps_down: usize,
    },
    #[error("ill-conditioned fit (condition number {condition:.3e})")]
    IllConditionedFit { condition: f64 },
    #[error("insufficient points for interpolation: {0}")]
    InsufficientPoints(String),
    #[error("query ({x:.4}, {y:.4}) lies outside the calibrated hull")]
    QueryOutsideHull { x: f64, y: f64 },
    #[error("synchronization failed: {0}")]
    Sync(String),

    #[error("vertical load |F_z| = {fz:.3} N does not exceed the {min:.3} N minimum")]
    InsufficientLoad { fz: f64, min: f64 },
    #[error("degenerate force directions: direction-ratio variance {variance:.3e} < 1e-8")]
    DegenerateDirections { variance: f64 },
    #[error("rank-deficient surface fit (condition number {condition:.3e})")]
    RankDeficient { condition: f64 },
    #[error("position ({x:.4}, {y:.4}) is outside the calibrated area")]
    OutOfBounds { x: f64, y: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no strides detected")]
    NoStridesDetected,
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::Parse { .. } => Category::Parse,
            Error::Config(_) | Error::Io { .. } => Category::Config,
            _ => Category::Analysis,
        }
    }

    pub(crate) fn parse(source_name: &str, row: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            row,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
