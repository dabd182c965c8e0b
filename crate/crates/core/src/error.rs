use thiserror::Error;

/// Errors raised while building states, strategies or protocol runs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("amplitude {index} is not finite ({re}, {im})")]
    NonFiniteAmplitude { index: usize, re: f64, im: f64 },

    #[error("state is not normalized: squared norm = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("probability {value} is negative beyond clamping tolerance")]
    NegativeProbability { value: f64 },

    #[error("random draw {0} outside [0, 1)")]
    DrawOutOfRange(f64),

    #[error("theta {0} outside [0, pi/2]")]
    ThetaOutOfRange(f64),

    #[error("round count must be at least 1")]
    ZeroRounds,

    #[error("trial count must be at least 1")]
    ZeroTrials,

    #[error("empty outcome list")]
    EmptyOutcomes,

    #[error("strategy for {found} supplied where a {expected} strategy is required")]
    PartyMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("analytic pass probability is undefined for {0}")]
    NoAnalyticForm(String),

    #[error("cannot parse strategy `{input}`: {reason}")]
    StrategyParse { input: String, reason: String },

    #[error("malformed transcript at line {line}: {reason}")]
    TranscriptParse { line: usize, reason: String },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("invalid sweep range: {0}")]
    SweepRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
