use thiserror::Error;

/// Errors raised by the series engine and the pipelines built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ring mismatch: [{left}] vs [{right}]")]
    RingMismatch { left: String, right: String },

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("substituting a value with nonzero constant term into `{0}` requires explicit permission")]
    ConstantSubstitution(String),

    #[error("series has zero constant term and is not invertible")]
    NotInvertible,

    #[error("logarithm needs constant term 1 (or a power of 2 when log 2 is tracked), found {0}")]
    LogConstant(String),

    #[error("exponential needs a series with zero constant term")]
    ExpConstant,

    #[error("series is not nilpotent under the truncation rule")]
    NotNilpotent,

    #[error("integrating in `{var}` exceeds its cap {cap}")]
    CapOverflow { var: String, cap: u32 },

    #[error("fixed-point iteration did not contract: level {level} changed after it was fixed")]
    NonContraction { level: u32 },

    #[error("fixed-point iteration did not stabilise within {0} steps")]
    NoConvergence(usize),

    #[error("jet variable overflow: need u{needed} but the jet ring stops at u{available}")]
    JetOverflow { needed: usize, available: usize },

    #[error("operator cutoff too small: need K >= {required}, have {have}")]
    CutoffTooSmall { required: i32, have: i32 },

    #[error("lax configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("internal invariant failed: {0}")]
    Invariant(String),

    #[error("residual of {what} is nonzero at genus {genus}: monomial {monomial} has coefficient {coefficient}")]
    Residual {
        what: String,
        genus: u32,
        monomial: String,
        coefficient: String,
    },

    #[error("linear system: {0}")]
    LinearSystem(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
