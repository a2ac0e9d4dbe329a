//! Arbitrary-precision real and complex arithmetic.
//!
//! Every value carries its working precision in bits. Operations on
//! mixed-precision inputs compute at the minimum input precision, and each
//! operation keeps the relative error within `2^(-p+8)` (the backend rounds
//! correctly at `p` bits, leaving plenty of slack for composite wrappers).
//! Complex functions use principal branches; arguments landing exactly on a
//! branch cut are rejected with an error rather than silently picking a side.

mod complex;
mod real;

pub use complex::{complex_fn, BigComplex, ComplexFn};
pub use real::{prec_for_digits, real_fn, BigReal, RealFn, MIN_PRECISION};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MpError {
    #[error("{func}: argument out of domain ({detail})")]
    Domain { func: &'static str, detail: String },
    #[error("{func}: argument on branch cut ({detail})")]
    BranchCut { func: &'static str, detail: String },
    #[error("invalid decimal literal: {0:?}")]
    Parse(String),
    #[error("precision must be at least {MIN_PRECISION} bits (got {0})")]
    Precision(usize),
    #[error("{0}: result is not finite")]
    NonFinite(&'static str),
}
