//! Exact local-factor identities and floating point evaluators for mean
//! squares of long Dirichlet polynomials with generalized divisor coefficients.
#![no_std]
// `num_traits::Float` supplies float methods without std; builds that link std see it as unused.
#![allow(unused_imports)]

extern crate alloc;

pub mod error;
pub mod local;
pub mod multiplicity;
pub mod numeric;
pub mod qseries;
pub mod rational;
pub mod shifts;

pub use error::{Error, Result};
pub use qseries::{QSeries, Ring};
pub use rational::Rational;
pub use shifts::{NumericShiftSet, ShiftSet};
