//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the simulation engine.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An electrode partition could not be formed for the requested shape.
    #[error("indivisible raster configuration: {0}")]
    Indivisible(String),

    /// A stimulus specification was rejected.
    #[error("invalid stimulus: {0}")]
    InvalidStimulus(String),

    /// Time step outside the integrator's stability range.
    #[error("time step {dt} s outside (0, {max}] s")]
    TimeStep { dt: f64, max: f64 },

    /// Frame timestamps must be strictly increasing.
    #[error("non-monotone timestamps: frame {index} has t={t} after t={prev}")]
    NonMonotoneTime { index: usize, t: f64, prev: f64 },

    /// Two streams or buffers that must agree in shape did not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Inputs do not overlap in time.
    #[error("empty time overlap between traces")]
    EmptyOverlap,

    /// File or stream contents could not be parsed.
    #[error("parse error in {what}: {detail}")]
    Parse { what: String, detail: String },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
