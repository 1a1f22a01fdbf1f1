//! Crate-wide error type and process exit-code mapping.

use thiserror::Error;

/// Errors produced by model evaluation, simulation, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates an invariant. `path` is the dotted
    /// key path (e.g. `oscillator.f_osc_hz`) when the value came from a
    /// scenario file, or a parameter name otherwise.
    #[error("invalid value for {path}: {message}")]
    Validation { path: String, message: String },

    /// A scenario file could not be read or decoded.
    #[error("cannot load scenario: {0}")]
    ScenarioLoad(String),

    /// No puncture fits in the superframe (floor(T / t_lat) = 0).
    #[error("empty schedule: no puncture fits in superframe {superframe_s} s at latency {latency_s} s")]
    EmptySchedule { superframe_s: f64, latency_s: f64 },

    /// Total leaf transmission time exceeds the superframe.
    #[error("oversubscribed channel: total transmission fraction {tx_fraction} exceeds 1")]
    Oversubscribed { tx_fraction: f64 },

    /// Synchronization waits drove channel availability below zero.
    #[error("saturated: wait fraction {wait_fraction} exceeds the ideal availability")]
    Saturated { wait_fraction: f64 },

    /// A duration argument was negative where only t >= 0 is meaningful.
    #[error("negative duration rejected: {value} s")]
    NegativeDuration { value: f64 },

    /// An event trace violates its ordering or pairing rules.
    #[error("malformed trace: {0}")]
    MalformedTrace(String),

    /// Unknown sweep axis name.
    #[error("unknown sweep axis `{0}` (expected superframe, latency, n_leaves, distance, f_osc, drift_ppm or sigma)")]
    UnknownAxis(String),

    /// A plot or table operation referenced a column that does not exist.
    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    /// A sweep or plot range specification is unusable.
    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 0 is success, 2 a validation error, 3 a
    /// runtime/model error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. }
            | Error::ScenarioLoad(_)
            | Error::UnknownAxis(_)
            | Error::UnknownColumn(_)
            | Error::InvalidRange(_)
            | Error::NegativeDuration { .. } => 2,
            Error::EmptySchedule { .. }
            | Error::Oversubscribed { .. }
            | Error::Saturated { .. }
            | Error::MalformedTrace(_)
            | Error::Io(_) => 3,
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(path: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        path: path.to_string(),
        message: message.into(),
    }
}
