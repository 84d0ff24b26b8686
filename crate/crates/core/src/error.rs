use thiserror::Error;

/// Errors raised by the replication calculus.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("quantile of {0} is infinite")]
    InfiniteQuantile(f64),
    #[error("effect size is zero; no sample size can detect it")]
    UndetectableEffect,
    #[error("target {target} is at or below the floor {floor} (alpha/2)")]
    UnreachableTarget { target: f64, floor: f64 },
    #[error("invalid range [{lo}, {hi}) with bin width {delta}: {reason}")]
    InvalidRange {
        lo: f64,
        hi: f64,
        delta: f64,
        reason: &'static str,
    },
    #[error("threshold {threshold} is not aligned to a bin edge (origin {origin}, width {delta})")]
    Misaligned { threshold: f64, origin: f64, delta: f64 },
    #[error("bin widths differ: {0} vs {1}")]
    DeltaMismatch(f64, f64),
    #[error("this operation needs a finite replicating sample size")]
    InfiniteSampleSize,
    #[error("trial count must be at least 1")]
    ZeroTrials,
    #[error("dataset checksum mismatch: expected {expected}, found {found}")]
    Checksum { expected: String, found: String },
    #[error("malformed dataset: {0}")]
    Dataset(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_open_unit(name: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::NonFinite(name));
    }
    if value <= 0.0 || value >= 1.0 {
        return Err(Error::OutOfRange {
            name,
            value,
            range: "(0, 1)",
        });
    }
    Ok(value)
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::NonFinite(name));
    }
    if value <= 0.0 {
        return Err(Error::OutOfRange {
            name,
            value,
            range: "(0, inf)",
        });
    }
    Ok(value)
}
