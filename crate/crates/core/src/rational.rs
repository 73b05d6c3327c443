//! Exact rationals with a machine-word fast path.
//!
//! Values that fit `i64 / i64` are kept inline; anything larger spills into a
//! `BigRational`. Both forms are kept canonical, so derived structural
//! comparisons coincide with value equality.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};
use core::ops::{Add, AddAssign, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Repr {
    /// Lowest terms, `den > 0`.
    Small(i64, i64),
    /// Only used when the value does not fit `Small`.
    Big(BigRational),
}

/// Arbitrary precision rational number in lowest terms.
#[derive(Clone, Debug)]
pub struct Rational(Repr);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational(Repr::Small(0, 1));
    pub const ONE: Rational = Rational(Repr::Small(1, 1));

    pub fn from_int(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    /// `num / den`; fails on a zero denominator.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Self::from_i128(num as i128, den as i128))
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        if num == 0 {
            return Self::ZERO;
        }
        let neg = (num < 0) != (den < 0);
        let (un, ud) = (num.unsigned_abs(), den.unsigned_abs());
        let g = gcd_u128(un, ud);
        let (un, ud) = (un / g, ud / g);
        if un <= i64::MAX as u128 && ud <= i64::MAX as u128 {
            let n = un as i64;
            return Rational(Repr::Small(if neg { -n } else { n }, ud as i64));
        }
        let n = BigInt::from(un);
        let n = if neg { -n } else { n };
        Rational(Repr::Big(BigRational::new_raw(n, BigInt::from(ud))))
    }

    fn from_big(r: BigRational) -> Self {
        // `BigRational` arithmetic already reduces; demote when it fits.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            return Rational(Repr::Small(n, d));
        }
        Rational(Repr::Big(r))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    /// Denominator when it fits a machine word.
    pub fn denom_u64(&self) -> Option<u64> {
        match &self.0 {
            Repr::Small(_, d) => Some(*d as u64),
            Repr::Big(r) => r.denom().to_u64(),
        }
    }

    /// `(num, den)` when both fit a machine word.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match &self.0 {
            Repr::Small(n, d) => Some((*n, *d)),
            Repr::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.denom().is_one(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        self.to_big().ceil().to_integer()
    }

    /// Smallest integer `>= self`, as `i64`, if it fits.
    pub fn ceil_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, d) => Some(n.div_euclid(*d) + i64::from(n.rem_euclid(*d) != 0)),
            Repr::Big(_) => self.ceil().to_i64(),
        }
    }

    /// `self * k` as an integer, or `None` if that is not integral or too large.
    pub fn scaled_integer(&self, k: i64) -> Option<i64> {
        let p = self * &Rational::from_int(k);
        match p.0 {
            Repr::Small(n, 1) => Some(n),
            _ => None,
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(match &self.0 {
            Repr::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Repr::Big(r) => Self::from_big(r.recip()),
        })
    }

    /// `self += a * b`, the hot operation of series multiplication.
    pub fn add_mul(&mut self, a: &Rational, b: &Rational) {
        if let (Repr::Small(x, 1), Repr::Small(y, 1), Repr::Small(z, 1)) = (&self.0, &a.0, &b.0) {
            if let Some(v) = (*y as i128)
                .checked_mul(*z as i128)
                .and_then(|p| p.checked_add(*x as i128))
            {
                if let Ok(v) = i64::try_from(v) {
                    self.0 = Repr::Small(v, 1);
                    return;
                }
            }
        }
        let p = a * b;
        *self += &p;
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}
impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}
impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Self::from_big(r)
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, o: &Rational) -> Rational {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &o.0) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if b == d {
                return Rational::from_i128(a + c, b);
            }
            return Rational::from_i128(a * d + c * b, b * d);
        }
        Rational::from_big(self.to_big() + o.to_big())
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, o: &Rational) -> Rational {
        self + &(-o.clone())
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, o: &Rational) -> Rational {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &o.0) {
            return Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128);
        }
        Rational::from_big(self.to_big() * o.to_big())
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, o: Rational) -> Rational {
        &self + &o
    }
}
impl Sub for Rational {
    type Output = Rational;
    fn sub(self, o: Rational) -> Rational {
        &self - &o
    }
}
impl Mul for Rational {
    type Output = Rational;
    fn mul(self, o: Rational) -> Rational {
        &self * &o
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, o: &Rational) {
        *self = &*self + o;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self.0 {
            Repr::Small(n, d) if n != i64::MIN => Rational(Repr::Small(-n, d)),
            Repr::Small(n, d) => Rational::from_i128(-(n as i128), d as i128),
            Repr::Big(r) => Rational::from_big(-r),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `n`, `n/d`, and terminating decimals such as `-0.125`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(alloc::format!("malformed rational literal {s:?}"));
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(alloc::format!("zero denominator in {s:?}")));
            }
            return Ok(Rational::from_big(BigRational::new(n, d)));
        }
        if let Some((ip, fp)) = s.split_once('.') {
            if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let neg = ip.trim_start().starts_with('-');
            let ip_abs = ip.trim().trim_start_matches(['-', '+']);
            let mut digits = String::from(if ip_abs.is_empty() { "0" } else { ip_abs });
            digits.push_str(fp);
            let n: BigInt = digits.parse().map_err(|_| bad())?;
            let d = num_traits::pow(BigInt::from(10), fp.len());
            let n = if neg { -n } else { n };
            return Ok(Rational::from_big(BigRational::new(n, d)));
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_big(BigRational::from_integer(n)))
    }
}

/// Least common multiple of two positive integers.
pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

impl Rational {
    /// Canonical text form, same as `Display`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}
