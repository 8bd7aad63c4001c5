use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate range: lo {lo} must be strictly below hi {hi}")]
    DegenerateRange { lo: f64, hi: f64 },

    #[error("{what} must be strictly positive (got {value})")]
    NonPositive { what: &'static str, value: f64 },

    #[error("invalid {what}: {why}")]
    InvalidSpec { what: &'static str, why: String },

    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("delay spread of {spread_taps:.3} taps exceeds the {capacity} taps left by the kernel window")]
    DelaySpreadExceedsWindow { spread_taps: f64, capacity: usize },

    #[error("water-filling requires at least one positive channel gain")]
    AllGainsZero,

    #[error("negative power entry at subcarrier {index}")]
    NegativePower { index: usize },

    #[error("relative rate needs a strictly positive bound")]
    NonPositiveBound,

    #[error("PSN intensity {0} outside [0, 1]")]
    EpsilonOutOfRange(f64),

    #[error("surface deformation needs at least 2 columns")]
    TooFewColumns,

    #[error("channel realization is zero at every tap; no configuration exists")]
    AllZeroChannel,

    #[error("non-finite gradient entry at element {index}")]
    NonFiniteGradient { index: usize },

    #[error("scenario produced no valid trials ({degenerate} degenerate)")]
    NoValidTrials { degenerate: u64 },

    #[error("unknown sweep axis `{0}`")]
    UnknownAxis(String),
}
