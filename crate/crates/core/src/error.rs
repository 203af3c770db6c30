//! Error type shared by every module.

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{a} and {delta} are not coprime")]
    NotCoprime { a: i64, delta: u64 },

    #[error("degenerate modulus {0}")]
    DegenerateModulus(u64),

    #[error("n = {n} exceeds the cap of {cap} for {what}")]
    CapExceeded { n: u64, cap: u64, what: &'static str },

    #[error("k = {k} is outside [0, {k_bar}] for delta1 = {delta1}")]
    BadK { k: u32, k_bar: u32, delta1: u64 },

    #[error("edge {edge} does not fit in [1, {n}]")]
    ContainmentViolation { edge: String, n: u64 },

    #[error("grid of size {m} is too coarse; need more than {needed}")]
    GridTooCoarse { m: u64, needed: u64 },

    #[error("n = {n} is below the minimum {min}")]
    BelowMinN { n: u64, min: u64 },

    #[error("invariant '{invariant}' failed in {module}: {detail}")]
    InternalInvariantViolation {
        module: &'static str,
        invariant: &'static str,
        detail: String,
    },

    #[error("family mismatch: {0}")]
    FamilyMismatch(String),

    #[error("alpha = {0} is outside [0, 1)")]
    AlphaOutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse '{input}': {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    pub(crate) fn invariant(
        module: &'static str,
        invariant: &'static str,
        detail: impl Into<String>,
    ) -> Self {
        Error::InternalInvariantViolation {
            module,
            invariant,
            detail: detail.into(),
        }
    }

    /// True for failures of a checked invariant, as opposed to bad input.
    pub fn is_invariant_failure(&self) -> bool {
        matches!(
            self,
            Error::InternalInvariantViolation { .. }
                | Error::ContainmentViolation { .. }
                | Error::FamilyMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
