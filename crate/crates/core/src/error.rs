//! Error type shared across the toolkit.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Undersampling factors share a common divisor.
    #[error("undersampling factors r0={r0} and r1={r1} are not coprime")]
    NotCoprime { r0: usize, r1: usize },

    /// The channels must be ordered r0 < r1.
    #[error("undersampling factors must satisfy r0 < r1 (got r0={r0}, r1={r1})")]
    OrderViolation { r0: usize, r1: usize },

    /// A scheme or generator parameter that must be positive is not.
    #[error("parameter {name} must be positive (got {value})")]
    NonPositiveParameter { name: &'static str, value: f64 },

    /// Scheme parameters overflow the frame-length arithmetic.
    #[error("scheme parameters overflow the frame length computation")]
    ParameterOverflow,

    /// A vector length does not match the expected frame length.
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// The lag window exceeds the frame length.
    #[error("lag window too wide: M={m} exceeds frame length N={n}")]
    WindowTooWide { m: usize, n: usize },

    /// Two autocorrelation sequences disagree on their lag window.
    #[error("lag window mismatch between autocorrelation sequences")]
    LagWindowMismatch,

    /// No lag in the window has a single coinciding sample pair.
    #[error("no lag in the window is covered by the sampling scheme")]
    AllLagsUncovered,

    /// Strict reconstruction refused an uncovered lag.
    #[error("lag {lag} is not covered by the sampling scheme (strict mode)")]
    UncoveredLag { lag: isize },

    /// A generator frequency falls outside [0, fs).
    #[error("frequency {freq_hz} Hz outside the representable band [0, {fs_hz}) Hz")]
    FrequencyOutOfBand { freq_hz: f64, fs_hz: f64 },

    /// BPSK symbol rate at or above the sample rate.
    #[error("symbol rate {symbol_rate_hz} Hz too high for sample rate {fs_hz} Hz")]
    SymbolRateTooHigh { symbol_rate_hz: f64, fs_hz: f64 },

    /// An LFM sweep leaves [0, fs].
    #[error("frequency sweep [{lo_hz}, {hi_hz}] Hz outside [0, {fs_hz}] Hz")]
    SweepOutOfBand { lo_hz: f64, hi_hz: f64, fs_hz: f64 },

    /// SNR calibration is undefined for an all-zero frame.
    #[error("cannot calibrate SNR against a zero-power frame")]
    ZeroSignalPower,

    /// RMSE aggregation over an empty trial list.
    #[error("no trials to aggregate")]
    EmptyTrials,

    /// Invalid evaluation or scenario configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Groups errors into the coarse classes the CLI maps to exit codes.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NotCoprime { .. }
            | Error::OrderViolation { .. }
            | Error::NonPositiveParameter { .. }
            | Error::ParameterOverflow
            | Error::WindowTooWide { .. }
            | Error::FrequencyOutOfBand { .. }
            | Error::SymbolRateTooHigh { .. }
            | Error::SweepOutOfBand { .. }
            | Error::ZeroSignalPower
            | Error::EmptyTrials
            | Error::Config(_)
            | Error::Json(_) => ErrorClass::Config,
            Error::Io(_) => ErrorClass::Io,
            Error::LengthMismatch { .. } | Error::LagWindowMismatch => ErrorClass::Shape,
            Error::AllLagsUncovered | Error::UncoveredLag { .. } => ErrorClass::Coverage,
        }
    }
}

/// Coarse failure class, used by front ends to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Io,
    Shape,
    Coverage,
}
