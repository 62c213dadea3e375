//! Closed-form enumeration and hull-volume formulas, evaluated exactly where
//! possible and otherwise in 320-bit floating point.

pub mod counting;
pub mod gf;
pub mod hull;
pub mod exponent;
pub mod real;
pub mod series;

pub use real::Real;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum AnalyticError {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("intermediate value overflowed: {0}")]
    Overflow(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> AnalyticError {
    AnalyticError::Domain(msg.into())
}
