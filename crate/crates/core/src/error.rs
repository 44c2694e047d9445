//! Error type shared by all simulation modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Chains need at least six sites so that boundary, near-boundary and
    /// bulk bonds are all present.
    #[error("chain too short: N = {n}, need N >= 6")]
    ChainTooShort { n: usize },

    /// A coupling ended up zero or negative.
    #[error("non-positive coupling on bond {bond}: {value}")]
    NonPositiveCoupling { bond: String, value: f64 },

    /// A numeric input was NaN or infinite.
    #[error("non-finite input: {what}")]
    NonFinite { what: &'static str },

    /// A parameter fell outside its documented range.
    #[error("invalid parameter {name}: {value} ({requirement})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// The symmetric eigensolver failed to converge.
    #[error("eigensolver failed to converge on a {dim}x{dim} matrix")]
    Eigensolver { dim: usize },

    /// Two objects that must share a dimension did not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A 1-based site index fell outside 1..=N.
    #[error("site index {site} out of range 1..={n}")]
    SiteOutOfRange { site: usize, n: usize },

    /// An amplitude or norm exceeded 1 by more than roundoff tolerance,
    /// which indicates a propagation bug upstream.
    #[error("amplitude norm violation: {magnitude} exceeds 1 beyond tolerance")]
    AmplitudeOverflow { magnitude: f64 },

    /// No qualifying local maximum was found in a fidelity series.
    #[error("no arrival detected in fidelity series")]
    NoArrival,

    /// A scan point failed; carries the offending coupling or deviation value.
    #[error("scan failed at value {value}: {source}")]
    AtScanPoint {
        value: f64,
        #[source]
        source: Box<Error>,
    },

    /// Every point of a sweep failed.
    #[error("sweep produced no successful points ({failures} failures)")]
    SweepAllFailed { failures: usize },

    /// Malformed serialized input (JSON spec, CSV series).
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn at_value(self, value: f64) -> Error {
        Error::AtScanPoint {
            value,
            source: Box::new(self),
        }
    }
}
