//! Floating-point evaluation of the global objects.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

pub mod arith;
pub mod correlation;
pub mod delta;
pub mod dirichlet;
pub mod euler;
pub mod quad;
pub mod recipe;
pub mod sieve;
pub mod testfn;
pub mod zeta;

pub use arith::ramanujan_sum;
pub use correlation::{correlation_sum, direct_integral};
pub use delta::{delta_main_term, empirical_correlation};
pub use euler::{euler_b, euler_b_with, EulerValue};
pub use dirichlet::{dirichlet_poly, tau_global, TauTable};
pub use recipe::{recipe_predict, RecipeTerm};
pub use sieve::SieveTable;
pub use testfn::TestFunction;
pub use zeta::zeta_num;

/// Which evaluator produced a [`MomentReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    CorrelationSum,
    DirectIntegral,
    Recipe,
    DeltaMainTerm,
    Empirical,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::CorrelationSum => "correlation-sum",
            Method::DirectIntegral => "direct-integral",
            Method::Recipe => "recipe",
            Method::DeltaMainTerm => "delta-main-term",
            Method::Empirical => "empirical",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Value of one evaluator with its error estimate and parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub method: Method,
    pub value: Complex64,
    pub error: f64,
    /// Named parameters in insertion order (T, X, shifts, quadrature data).
    pub params: Vec<(String, String)>,
}

impl MomentReport {
    pub fn new(method: Method, value: Complex64, error: f64) -> Self {
        MomentReport { method, value, error, params: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.push((key.into(), alloc::format!("{value}")));
        self
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Finite value with a non-negative error.
    pub fn is_well_formed(&self) -> bool {
        self.value.re.is_finite() && self.value.im.is_finite() && self.error >= 0.0 && self.error.is_finite()
    }
}

pub(crate) fn fmt_shifts(s: &[f64]) -> String {
    let parts: Vec<String> = s.iter().map(|x| alloc::format!("{x}")).collect();
    alloc::format!("{{{}}}", parts.join(", "))
}
