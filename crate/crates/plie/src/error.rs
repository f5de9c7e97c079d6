use thiserror::Error;

/// Errors surfaced by the public operations of this crate.
///
/// Internal arithmetic (adding two scalars, say) asserts on misuse instead;
/// only contract-level failures that a caller can provoke with reasonable
/// input are represented here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    InvalidModulus(u64),

    #[error("zero has no inverse in F_{0}")]
    ZeroInverse(u64),

    #[error("mixed contexts: {0}")]
    MixedContext(String),

    #[error("degree {degree} outside the valid range 1..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("context too large: {0}")]
    ContextTooLarge(String),

    #[error("enveloping dimension {dim} = {p}^{n} exceeds the size limit {limit}")]
    SizeBound { p: u64, n: usize, dim: u128, limit: u128 },

    #[error("the canonical map into the primitives of the enveloping algebra is not an isomorphism: {0}")]
    UnitNotIso(String),

    #[error("truncation degree {degree} is too small; need at least {needed}")]
    TruncationTooSmall { degree: usize, needed: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown basis name {0:?}")]
    Name(String),
}
