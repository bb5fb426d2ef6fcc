use thiserror::Error;

/// Errors raised by the series engine, the number families and the
/// probabilistic layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("division by a series with zero constant term")]
    ZeroConstantTerm,
    #[error("inner series of a composition must have zero constant term")]
    NonZeroConstantTerm,
    #[error("not a delta series: {0}")]
    NotDelta(&'static str),
    #[error("coefficient index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("power {exponent} of a series with constant term {constant} is not rational")]
    IrrationalPower { exponent: String, constant: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("moment sequence too short: need E[Y^{needed}], have up to E[Y^{available}]")]
    MissingMoments { needed: usize, available: usize },
    #[error("E[Y] = 0: first-kind quantities need a nonzero mean")]
    ZeroMean,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
