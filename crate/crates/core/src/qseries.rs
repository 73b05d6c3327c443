//! Sparse truncated series in `Y = X^{1/D}` with exact rational coefficients.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Lowest exponent accepted when no guard is configured.
pub const NO_FLOOR: i64 = i64::MIN / 4;

/// Ambient ring: `Y`-denominator, top retained exponent, guard floor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    pub denom: u32,
    pub cutoff: i64,
    pub floor: i64,
}

impl Ring {
    pub fn new(denom: u32, cutoff: i64) -> Self {
        Ring {
            denom,
            cutoff,
            floor: NO_FLOOR,
        }
    }

    pub fn with_floor(denom: u32, cutoff: i64, floor: i64) -> Self {
        Ring {
            denom,
            cutoff,
            floor,
        }
    }

    fn check(&self, o: &Ring) -> Result<()> {
        if self != o {
            return Err(Error::RingMismatch {
                d1: self.denom,
                c1: self.cutoff,
                f1: self.floor,
                d2: o.denom,
                c2: o.cutoff,
                f2: o.floor,
            });
        }
        Ok(())
    }

    fn guard(&self, e: i64) -> Result<()> {
        if e < self.floor {
            Err(Error::FloorBreach {
                exponent: e,
                floor: self.floor,
            })
        } else {
            Ok(())
        }
    }
}

/// First coefficient where two series differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub exponent: i64,
    pub left: Rational,
    pub right: Rational,
}

/// Canonical sparse series: sorted exponents, no zero coefficients, all `<= cutoff`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSeries {
    ring: Ring,
    terms: Vec<(i64, Rational)>,
}

impl QSeries {
    pub fn zero(ring: Ring) -> Self {
        QSeries {
            ring,
            terms: Vec::new(),
        }
    }

    pub fn one(ring: Ring) -> Self {
        Self::monomial(0, Rational::ONE, ring).expect("floor above zero")
    }

    /// `c * Y^e`, zero beyond the cutoff; fails only below the guard floor.
    pub fn monomial(e: i64, c: Rational, ring: Ring) -> Result<Self> {
        ring.guard(e)?;
        let mut s = Self::zero(ring);
        if e <= ring.cutoff && !c.is_zero() {
            s.terms.push((e, c));
        }
        Ok(s)
    }

    /// `Y^e` with unit coefficient.
    pub fn y_pow(e: i64, ring: Ring) -> Result<Self> {
        Self::monomial(e, Rational::ONE, ring)
    }

    /// Build from arbitrary (exponent, coefficient) pairs, combining repeats.
    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(ring: Ring, it: I) -> Result<Self> {
        let mut v: Vec<(i64, Rational)> = Vec::new();
        for (e, c) in it {
            ring.guard(e)?;
            if e <= ring.cutoff {
                v.push((e, c));
            }
        }
        v.sort_by_key(|t| t.0);
        let mut out: Vec<(i64, Rational)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc += &c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Ok(QSeries { ring, terms: out })
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn terms(&self) -> &[(i64, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.first().map(|t| t.0)
    }

    pub fn coeff(&self, e: i64) -> Rational {
        match self.terms.binary_search_by_key(&e, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rational::ZERO,
        }
    }

    pub fn add(&self, o: &QSeries) -> Result<QSeries> {
        self.ring.check(&o.ring)?;
        Ok(self.add_unchecked(o))
    }

    fn add_unchecked(&self, o: &QSeries) -> QSeries {
        let (a, b) = (&self.terms, &o.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j].clone());
                j += 1;
            } else {
                let c = &a[i].1 + &b[j].1;
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        QSeries {
            ring: self.ring,
            terms: out,
        }
    }

    /// In-place `self += o`.
    pub fn add_assign(&mut self, o: &QSeries) -> Result<()> {
        self.ring.check(&o.ring)?;
        if o.terms.is_empty() {
            return Ok(());
        }
        if self.terms.is_empty() {
            self.terms = o.terms.clone();
            return Ok(());
        }
        *self = self.add_unchecked(o);
        Ok(())
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            ring: self.ring,
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, o: &QSeries) -> Result<QSeries> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Rational) -> QSeries {
        if c.is_zero() {
            return Self::zero(self.ring);
        }
        QSeries {
            ring: self.ring,
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Multiply by `Y^k`, dropping what passes the cutoff.
    pub fn shift(&self, k: i64) -> Result<QSeries> {
        if let Some(v) = self.valuation() {
            self.ring.guard(v + k)?;
        }
        let cut = self.ring.cutoff;
        Ok(QSeries {
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + k, c.clone()))
                .take_while(|t| t.0 <= cut)
                .collect(),
        })
    }

    pub fn mul(&self, o: &QSeries) -> Result<QSeries> {
        self.ring.check(&o.ring)?;
        let (a, b) = (&self.terms, &o.terms);
        if a.is_empty() || b.is_empty() {
            return Ok(Self::zero(self.ring));
        }
        let base = a[0].0 + b[0].0;
        let cut = self.ring.cutoff;
        if base > cut {
            return Ok(Self::zero(self.ring));
        }
        self.ring.guard(base)?;
        let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        if a.len() == 1 {
            let (ea, ca) = &a[0];
            let terms = b
                .iter()
                .take_while(|t| t.0 + ea <= cut)
                .map(|(eb, cb)| (ea + eb, ca * cb))
                .collect();
            return Ok(QSeries {
                ring: self.ring,
                terms,
            });
        }
        let b0 = b[0].0;
        let mut acc = vec![Rational::ZERO; (cut - base + 1) as usize];
        for (ea, ca) in a {
            if ea + b0 > cut {
                break;
            }
            for (eb, cb) in b {
                let e = ea + eb;
                if e > cut {
                    break;
                }
                acc[(e - base) as usize].add_mul(ca, cb);
            }
        }
        let terms = acc
            .into_iter()
            .enumerate()
            .filter(|t| !t.1.is_zero())
            .map(|(i, c)| (i as i64 + base, c))
            .collect();
        Ok(QSeries {
            ring: self.ring,
            terms,
        })
    }

    /// Inverse by the unit-series recursion.
    ///
    /// If the valuation `e0` is positive, coefficients above `cutoff - 2*e0`
    /// depend on input terms beyond the cutoff and are only formally correct.
    pub fn inv(&self) -> Result<QSeries> {
        let (e0, c0) = match self.terms.first() {
            Some(t) => t.clone(),
            None => return Err(Error::NotInvertible),
        };
        let cut = self.ring.cutoff;
        self.ring.guard(-e0)?;
        if -e0 > cut {
            return Ok(Self::zero(self.ring));
        }
        let len = (cut + e0 + 1) as usize;
        let inv0 = c0.recip()?;
        let neg_inv0 = -inv0.clone();
        let a: Vec<(usize, &Rational)> = self.terms[1..]
            .iter()
            .map(|(e, c)| ((e - e0) as usize, c))
            .take_while(|t| t.0 < len)
            .collect();
        let mut b = vec![Rational::ZERO; len];
        b[0] = inv0;
        for j in 1..len {
            let mut s = Rational::ZERO;
            for &(i, ai) in &a {
                if i > j {
                    break;
                }
                if !b[j - i].is_zero() {
                    s.add_mul(ai, &b[j - i]);
                }
            }
            if !s.is_zero() {
                b[j] = &s * &neg_inv0;
            }
        }
        let terms = b
            .into_iter()
            .enumerate()
            .filter(|t| !t.1.is_zero())
            .map(|(j, c)| (j as i64 - e0, c))
            .collect();
        Ok(QSeries {
            ring: self.ring,
            terms,
        })
    }

    /// Compare all coefficients with exponent `<= bound`.
    pub fn eq_upto(&self, o: &QSeries, bound: i64) -> Result<Option<Mismatch>> {
        self.ring.check(&o.ring)?;
        if bound > self.ring.cutoff {
            return Err(Error::InvalidArgument(format!(
                "comparison bound {bound} exceeds cutoff {}",
                self.ring.cutoff
            )));
        }
        let (a, b) = (&self.terms, &o.terms);
        let (mut i, mut j) = (0, 0);
        loop {
            let ea = a.get(i).map(|t| t.0).filter(|&e| e <= bound);
            let eb = b.get(j).map(|t| t.0).filter(|&e| e <= bound);
            match (ea, eb) {
                (None, None) => return Ok(None),
                (Some(x), Some(y)) if x == y => {
                    if a[i].1 != b[j].1 {
                        return Ok(Some(Mismatch {
                            exponent: x,
                            left: a[i].1.clone(),
                            right: b[j].1.clone(),
                        }));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(x), y) if y.map_or(true, |y| x < y) => {
                    return Ok(Some(Mismatch {
                        exponent: x,
                        left: a[i].1.clone(),
                        right: Rational::ZERO,
                    }))
                }
                (_, Some(y)) => {
                    return Ok(Some(Mismatch {
                        exponent: y,
                        left: Rational::ZERO,
                        right: b[j].1.clone(),
                    }))
                }
                _ => unreachable!(),
            }
        }
    }

    /// Same terms, new ring; terms above the new cutoff are dropped.
    pub fn recast(&self, ring: Ring) -> Result<QSeries> {
        if ring.denom != self.ring.denom {
            return Err(Error::RingMismatch {
                d1: self.ring.denom,
                c1: self.ring.cutoff,
                f1: self.ring.floor,
                d2: ring.denom,
                c2: ring.cutoff,
                f2: ring.floor,
            });
        }
        if let Some(v) = self.valuation() {
            ring.guard(v)?;
        }
        Ok(QSeries {
            ring,
            terms: self
                .terms
                .iter()
                .take_while(|t| t.0 <= ring.cutoff)
                .cloned()
                .collect(),
        })
    }

    /// Text form: one `exponent/D : num/den` line per term, ascending.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (e, c) in &self.terms {
            let _ = writeln!(s, "{}/{} : {}/{}", e, self.ring.denom, c.numer(), c.denom());
        }
        s
    }

    /// Inverse of [`QSeries::to_text`]; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str, ring: Ring) -> Result<QSeries> {
        let mut terms = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Parse(format!("bad series line {line:?}"));
            let (lhs, rhs) = line.split_once(':').ok_or_else(bad)?;
            let (e, d) = lhs.trim().split_once('/').ok_or_else(bad)?;
            let e: i64 = e.trim().parse().map_err(|_| bad())?;
            let d: u32 = d.trim().parse().map_err(|_| bad())?;
            if d != ring.denom {
                return Err(Error::Parse(format!("denominator {d} does not match ring {}", ring.denom)));
            }
            terms.push((e, rhs.trim().parse::<Rational>()?));
        }
        QSeries::from_terms(ring, terms)
    }
}

/// Free-function aliases mirroring the operation names.
pub fn qs_monomial(e: i64, c: Rational, denom: u32, cutoff: i64) -> QSeries {
    QSeries::monomial(e, c, Ring::new(denom, cutoff)).expect("unguarded ring")
}

pub fn qs_add(a: &QSeries, b: &QSeries) -> Result<QSeries> {
    a.add(b)
}

pub fn qs_mul(a: &QSeries, b: &QSeries) -> Result<QSeries> {
    a.mul(b)
}

pub fn qs_inv(a: &QSeries) -> Result<QSeries> {
    a.inv()
}

pub fn qs_eq_upto(a: &QSeries, b: &QSeries, bound: i64) -> Result<Option<Mismatch>> {
    a.eq_upto(b, bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(c: i64) -> Ring {
        Ring::new(1, c)
    }

    fn poly(r: Ring, cs: &[(i64, i64)]) -> QSeries {
        QSeries::from_terms(r, cs.iter().map(|&(e, c)| (e, Rational::from_int(c)))).unwrap()
    }

    #[test]
    fn monomials() {
        let r = ring(5);
        assert_eq!(qs_monomial(0, Rational::ONE, 1, 5), QSeries::one(r));
        assert!(qs_monomial(6, Rational::from_int(5), 1, 5).is_zero());
        let m = qs_monomial(-2, Rational::new(1, 3).unwrap(), 1, 5);
        assert_eq!(m.terms(), &[(-2, Rational::new(1, 3).unwrap())]);
        let guarded = Ring::with_floor(1, 5, -1);
        assert!(matches!(
            QSeries::y_pow(-2, guarded),
            Err(Error::FloorBreach { exponent: -2, floor: -1 })
        ));
    }

    #[test]
    fn basic_products() {
        let r = ring(6);
        let p = poly(r, &[(0, 1), (1, 1)]).mul(&poly(r, &[(0, 1), (1, -1)])).unwrap();
        assert_eq!(p, poly(r, &[(0, 1), (2, -1)]));
        let a = poly(r, &[(-1, 3), (2, 4)]);
        assert!(a.add(&a.neg()).unwrap().is_zero());
        let geo = poly(r, &(0..=6).map(|e| (e, 1)).collect::<Vec<_>>());
        let p = poly(r, &[(0, 1), (1, -1)]).mul(&geo).unwrap();
        assert_eq!(p, QSeries::one(r));
    }

    #[test]
    fn ring_mismatch() {
        let a = QSeries::one(ring(3));
        let b = QSeries::one(ring(4));
        assert!(matches!(a.mul(&b), Err(Error::RingMismatch { .. })));
        assert!(matches!(a.add(&b), Err(Error::RingMismatch { .. })));
        assert!(matches!(a.eq_upto(&b, 1), Err(Error::RingMismatch { .. })));
        let c = QSeries::one(Ring::new(2, 3));
        assert!(c.mul(&a).is_err());
    }

    #[test]
    fn inverses() {
        let r = ring(3);
        let inv = poly(r, &[(0, 1), (1, -1)]).inv().unwrap();
        assert_eq!(inv, poly(r, &[(0, 1), (1, 1), (2, 1), (3, 1)]));
        assert_eq!(QSeries::one(r).inv().unwrap(), QSeries::one(r));
        assert_eq!(QSeries::zero(r).inv(), Err(Error::NotInvertible));
        let a = poly(ring(8), &[(-2, 3), (0, 1), (5, -7)]);
        // valuation -2 costs two orders of precision in the product
        let prod = a.mul(&a.inv().unwrap()).unwrap();
        assert_eq!(prod.eq_upto(&QSeries::one(ring(8)), 6).unwrap(), None);
        assert!(prod.eq_upto(&QSeries::one(ring(8)), 7).unwrap().is_some());
    }

    #[test]
    fn comparisons() {
        let r = ring(5);
        let a = poly(r, &[(0, 1), (2, 5)]);
        assert_eq!(a.eq_upto(&a, 5).unwrap(), None);
        let b = poly(r, &[(0, 1), (3, 1)]);
        assert_eq!(QSeries::one(r).eq_upto(&b, 2).unwrap(), None);
        let c = poly(r, &[(0, 1), (1, 1)]);
        assert_eq!(
            QSeries::one(r).eq_upto(&c, 5).unwrap(),
            Some(Mismatch {
                exponent: 1,
                left: Rational::ZERO,
                right: Rational::ONE
            })
        );
        assert!(a.eq_upto(&a, 6).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let r = Ring::new(6, 20);
        let a = QSeries::from_terms(
            r,
            [(-3, Rational::new(-2, 7).unwrap()), (4, Rational::from_int(5))],
        )
        .unwrap();
        let t = a.to_text();
        assert_eq!(t, "-3/6 : -2/7\n4/6 : 5/1\n");
        assert_eq!(QSeries::from_text(&t, r).unwrap(), a);
        assert!(QSeries::from_text("1/5 : 1", r).is_err());
        assert!(QSeries::from_text("garbage", r).is_err());
    }
}
