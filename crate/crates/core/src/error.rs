use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A vector or matrix does not match the atom count of its measure space.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A measure space was built with no atoms.
    #[error("a measure space needs at least one atom")]
    EmptySpace,

    /// An atom mass is zero, negative, or not finite.
    #[error("atom {index} has invalid mass {mass}; masses must be positive and finite")]
    InvalidMass { index: usize, mass: f64 },

    /// A matrix entry or vector component is NaN or infinite.
    #[error("value at position {index} is not finite")]
    NonFinite { index: usize },

    /// A rectangle refers to an atom that does not exist.
    #[error("index {index} out of range for {len} atoms")]
    IndexOutOfRange { index: usize, len: usize },

    /// An exponent or parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An exact enumeration would exceed the configured size guard.
    #[error("{what}: size {required} exceeds the limit of {limit}")]
    CapacityExceeded {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    /// A split partition failed its recomputed norm bounds.
    #[error("split certification failed: {side} bound {bound} exceeds {limit}")]
    CertificationFailed { side: &'static str, bound: f64, limit: f64 },

    /// The simplex solver did not reach an optimum.
    #[error("linear program: {0}")]
    Lp(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
