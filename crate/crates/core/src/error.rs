use thiserror::Error;

use crate::eigenbasis::FreqIndex;

/// Errors raised by the transforms, diagnostics and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid of {n} samples along {axis} aliases truncation K={k} (need n > 2K)")]
    Aliasing { axis: &'static str, n: usize, k: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("datum is not admissible: {count} violation(s), first at ({}, {})", .first.xi1, .first.xi2)]
    Inadmissible { count: usize, first: FreqIndex },

    #[error("solution exceeds growth guard <xi>^{guard} at ({}, {}): |w| = {magnitude:e}", .xi.xi1, .xi.xi2)]
    GrowthGuard { xi: FreqIndex, magnitude: f64, guard: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("resolution check failed: {0}")]
    Resolution(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
