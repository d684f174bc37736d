use thiserror::Error;

use crate::dist::{DiscreteChannel, RdPoint};

pub type Result<T> = std::result::Result<T, RdgofError>;

/// Errors shared across the toolkit.
///
/// Input problems (bad probabilities, mismatched dimensions, out-of-range
/// parameters) are kept distinct from numeric failures so callers can map
/// them to different exit codes.
#[derive(Debug, Clone, Error)]
pub enum RdgofError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("probabilities sum to {sum:e}, expected 1 within 1e-12")]
    NotNormalized { sum: f64 },

    #[error("negative entry {value:e} at index {index}")]
    NegativeEntry { index: usize, value: f64 },

    #[error("label {label} out of range for alphabet of size {alphabet}")]
    LabelOutOfRange { label: usize, alphabet: usize },

    #[error("{name} = {value} outside valid range {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("distortion level {requested} outside achievable interval ({min}, {max})")]
    DistortionOutOfRange { requested: f64, min: f64, max: f64 },

    #[error(
        "solver did not converge within {iterations} iterations \
         (last rate {rate}, last distortion {distortion})",
        rate = last_point.rate,
        distortion = last_point.distortion
    )]
    NoConvergence {
        iterations: usize,
        last_channel: Box<DiscreteChannel>,
        last_point: RdPoint,
    },

    #[error("reference distribution has zero mass at index {0}")]
    ZeroReference(usize),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("incompatible arguments: {0}")]
    Incompatible(String),

    #[error("replication {index} failed: {source}")]
    Replication {
        index: usize,
        #[source]
        source: Box<RdgofError>,
    },
}

impl RdgofError {
    /// True for errors caused by bad user input rather than numeric trouble.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            RdgofError::NoConvergence { .. }
                | RdgofError::Numeric(_)
                | RdgofError::Replication { .. }
        )
    }
}
