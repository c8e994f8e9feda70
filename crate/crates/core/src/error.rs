use thiserror::Error;

/// Which factor of the product a quantity belongs to.
pub type FactorIndex = u8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `s` lies at or beyond a focal distance of a parallel family.
    #[error("parameter {s} is outside the focal-free interval ({lo}, {hi})")]
    Domain { s: f64, lo: f64, hi: f64 },

    /// An integration or evaluation left the focal-free region of factor `factor`.
    #[error("focal boundary of factor {factor} reached at s = {s}")]
    FocalBoundary { factor: FactorIndex, s: f64 },

    #[error("degenerate immersion: {0}")]
    Degenerate(String),

    #[error("ill-conditioned frame: {0}")]
    IllConditioned(String),

    #[error("unsupported catalog entry: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(GeomError::InvalidInput(msg.into()))
}
