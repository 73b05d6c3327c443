use alloc::string::String;

/// Every failure mode of the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate shift {0}")]
    DuplicateShift(String),
    #[error("shift {0} exceeds 1/2 in absolute value")]
    ShiftOutOfRange(String),
    #[error("swap produced colliding shifts: {0}")]
    SwapCollision(String),
    #[error("invalid swap selection: {0}")]
    InvalidSelection(String),
    #[error("invalid arity: {0}")]
    InvalidArity(String),
    #[error("ring mismatch: (D={d1}, cutoff={c1}, floor={f1}) vs (D={d2}, cutoff={c2}, floor={f2})")]
    RingMismatch {
        d1: u32,
        c1: i64,
        f1: i64,
        d2: u32,
        c2: i64,
        f2: i64,
    },
    #[error("exponent {exponent} below guard floor {floor}")]
    FloorBreach { exponent: i64, floor: i64 },
    #[error("series is not invertible")]
    NotInvertible,
    #[error("tail bound violation: {0}")]
    TailBoundViolation(String),
    #[error("{n} outside sieve range {limit}")]
    OutOfSieveRange { n: u64, limit: u64 },
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),
    #[error("divergent series: {0}")]
    DivergentSeries(String),
    #[error("argument {0} too close to the pole of zeta")]
    PoleProximity(f64),
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
