use alloc::string::String;

use crate::qseries::Mismatch;
use crate::rational::Rational;

/// How an identity was truncated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationMeta {
    /// `Y = X^{1/denom}`.
    pub denom: u32,
    /// Comparison order in `X`.
    pub order_x: u32,
    /// Cutoff (and comparison bound) in `Y` units.
    pub cutoff_y: i64,
    /// Largest value of every structural summation index.
    pub bound: usize,
    pub s_max: Rational,
    pub bound_scale: u32,
}

/// Outcome of one exact identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub identity: String,
    pub instance: String,
    pub ell: usize,
    pub passed: bool,
    pub mismatch: Option<Mismatch>,
    pub meta: TruncationMeta,
}

impl IdentityReport {
    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }
}
