use thiserror::Error;

/// Errors reported by the numerical layers.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("query outside tabulated hull: r = {r}, hull [{lo}, {hi}]")]
    InterpolationRange { r: f64, lo: f64, hi: f64 },

    #[error("tolerance failure: achieved {achieved:.3e}, requested {requested:.3e}")]
    Tolerance { achieved: f64, requested: f64 },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("root finding failed: {0}")]
    RootFind(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
