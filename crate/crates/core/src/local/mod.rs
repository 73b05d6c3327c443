//! Single-prime objects in the variable `X = 1/p`, computed exactly.
//!
//! Internally most sums are evaluated on *half-weighted* arrays
//! `A_h(n) = X^{n/2} A(n)`, whose exponents are all nonnegative once every
//! shift is below 1/2 in absolute value. The plain objects are recovered by a
//! monomial factor at the end.

mod identities;
mod report;

pub use identities::*;
pub use report::{IdentityReport, TruncationMeta};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::qseries::{QSeries, Ring};
use crate::rational::{lcm_u64, Rational};
use crate::shifts::{common_denominator_of, ShiftSet};

/// Truncation parameters shared by every identity check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalConfig {
    /// Comparison order in `X`.
    pub order_x: u32,
    /// Multiplier on every internal index bound (1 normally, 2 for the witness run).
    pub bound_scale: u32,
}

impl Default for LocalConfig {
    fn default() -> Self {
        LocalConfig {
            order_x: 12,
            bound_scale: 1,
        }
    }
}

impl LocalConfig {
    pub fn with_order(order_x: u32) -> Self {
        LocalConfig {
            order_x,
            bound_scale: 1,
        }
    }

    pub fn doubled(self) -> Self {
        LocalConfig {
            bound_scale: self.bound_scale * 2,
            ..self
        }
    }
}

/// The sequence `n -> tau_A(p^n) X^{n w}` for a fixed weight `w`.
#[derive(Clone, Debug)]
pub struct LocalArray {
    source: ShiftSet,
    weight: Rational,
    ring: Ring,
    /// `stages[i]` is the array of the first `i` shifts.
    stages: Vec<Vec<QSeries>>,
}

impl LocalArray {
    /// Unweighted array (`w = 0`).
    pub fn new(source: &ShiftSet, ring: Ring) -> Result<Self> {
        Self::weighted(source, Rational::ZERO, ring)
    }

    pub fn weighted(source: &ShiftSet, weight: Rational, ring: Ring) -> Result<Self> {
        for a in source.shifts() {
            y_units(&(a + &weight), ring.denom)?;
        }
        let mut stages = Vec::with_capacity(source.len() + 1);
        for _ in 0..=source.len() {
            stages.push(vec![QSeries::one(ring)]);
        }
        Ok(LocalArray {
            source: source.clone(),
            weight,
            ring,
            stages,
        })
    }

    pub fn source(&self) -> &ShiftSet {
        &self.source
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn len(&self) -> usize {
        self.stages[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Make `values()[0..n]` available.
    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        let d = self.ring.denom;
        let steps = self
            .source
            .shifts()
            .iter()
            .map(|a| y_units(&(a + &self.weight), d))
            .collect::<Result<Vec<_>>>()?;
        for m in self.len()..n {
            self.stages[0].push(QSeries::zero(self.ring));
            for (i, &e) in steps.iter().enumerate() {
                let prev = self.stages[i + 1][m - 1].shift(e)?;
                let v = self.stages[i][m].add(&prev)?;
                self.stages[i + 1].push(v);
            }
        }
        Ok(())
    }

    pub fn values(&self) -> &[QSeries] {
        self.stages.last().unwrap()
    }

    /// `values()[n]`, extending as needed.
    pub fn get(&mut self, n: usize) -> Result<QSeries> {
        self.extend_to(n + 1)?;
        Ok(self.values()[n].clone())
    }
}

/// `r * D` as an integer exponent, failing when `r` is not on the `1/D` grid.
pub(crate) fn y_units(r: &Rational, d: u32) -> Result<i64> {
    r.scaled_integer(d as i64)
        .ok_or_else(|| Error::InvalidArgument(format!("{r} is not a multiple of 1/{d}")))
}

/// `tau_A(p^n)` as a polynomial in `Y = X^{1/D}` with `D` the common denominator.
///
/// The ring is exact: its cutoff and floor enclose every possible exponent.
pub fn local_tau(a: &ShiftSet, n: usize) -> QSeries {
    let d = common_denominator_of(a.shifts()) as u32;
    let reach = (&a.max_abs() * &Rational::from_int(n as i64 * d as i64))
        .ceil_i64()
        .unwrap_or(0);
    let ring = Ring::with_floor(d, reach, -reach);
    local_tau_in(a, n, ring).expect("exact ring")
}

/// `tau_A(p^n)` in a caller supplied ring.
pub fn local_tau_in(a: &ShiftSet, n: usize, ring: Ring) -> Result<QSeries> {
    LocalArray::new(a, ring)?.get(n)
}

/// `A_alpha = {a + alpha}`; `tau_{A_alpha}(p^n) = X^{n alpha} tau_A(p^n)`.
pub fn shift_adjust(a: &ShiftSet, alpha: &Rational) -> Result<ShiftSet> {
    a.translate(alpha)
}

/// Array of `A u {0}` via `A^+(d) = A(d) + X^w A^+(d-1)` (plain `w = 0`).
pub fn a_plus(arr: &LocalArray) -> Result<LocalArray> {
    let zero = Rational::ZERO;
    if arr.source.contains(&zero) {
        return Err(Error::DuplicateShift("0".into()));
    }
    let src = arr.source.union(&[zero])?;
    let e = y_units(&arr.weight, arr.ring.denom)?;
    let base = arr.values();
    let mut vals: Vec<QSeries> = Vec::with_capacity(base.len());
    for (d, v) in base.iter().enumerate() {
        let next = if d == 0 {
            v.clone()
        } else {
            v.add(&vals[d - 1].shift(e)?)?
        };
        vals.push(next);
    }
    let mut stages = arr.stages.clone();
    stages.push(vals);
    Ok(LocalArray {
        source: src,
        weight: arr.weight.clone(),
        ring: arr.ring,
        stages,
    })
}

/// Shared truncation state for one instance: ring, index bound, array cache.
pub(crate) struct Ctx {
    pub denom: u32,
    pub smax: Rational,
    pub order_x: u32,
    pub scale: u32,
    cache: BTreeMap<(Vec<Rational>, Rational, i64), Rc<LocalArray>>,
}

impl Ctx {
    pub fn new<'a, I: IntoIterator<Item = &'a Rational>>(cfg: &LocalConfig, shifts: I) -> Result<Ctx> {
        let v: Vec<&Rational> = shifts.into_iter().collect();
        let denom = lcm_u64(2, common_denominator_of(v.iter().copied()));
        let denom = u32::try_from(denom).map_err(|_| Error::InvalidArgument("denominator too large".into()))?;
        let smax = v.iter().map(|r| r.abs()).max().unwrap_or(Rational::ZERO);
        if smax >= Rational::new(1, 2).unwrap() {
            return Err(Error::TailBoundViolation(format!(
                "max |shift| = {smax} leaves no decay margin"
            )));
        }
        if cfg.bound_scale == 0 {
            return Err(Error::InvalidArgument("bound_scale must be positive".into()));
        }
        Ok(Ctx {
            denom,
            smax,
            order_x: cfg.order_x,
            scale: cfg.bound_scale,
            cache: BTreeMap::new(),
        })
    }

    /// Comparison bound and cutoff in `Y` units.
    pub fn cutoff(&self) -> i64 {
        self.order_x as i64 * self.denom as i64
    }

    /// Weighted ring with `extra` additional `Y` orders; nothing may go negative.
    pub fn ring(&self, extra: i64) -> Ring {
        Ring::with_floor(self.denom, self.cutoff() + extra, 0)
    }

    /// `ceil(E / (1 - 2 s_max)) + 2`, scaled; `E` is the ring cutoff in `X` units.
    pub fn bound(&self, ring: Ring) -> usize {
        let e = Rational::new(ring.cutoff, self.denom as i64).unwrap();
        let margin = &Rational::ONE - &(&Rational::from_int(2) * &self.smax);
        let b = (&e * &margin.recip().unwrap()).ceil_i64().unwrap_or(0).max(0) + 2;
        b as usize * self.scale as usize
    }

    /// Half-weighted array of `set`, at least `len` long.
    pub fn half(&mut self, set: &ShiftSet, ring: Ring, len: usize) -> Result<Rc<LocalArray>> {
        self.weighted(set, Rational::new(1, 2).unwrap(), ring, len)
    }

    pub fn weighted(&mut self, set: &ShiftSet, w: Rational, ring: Ring, len: usize) -> Result<Rc<LocalArray>> {
        let key = (set.key(), w.clone(), ring.cutoff);
        if let Some(a) = self.cache.get(&key) {
            if a.len() >= len {
                return Ok(a.clone());
            }
        }
        let mut arr = LocalArray::weighted(set, w, ring)?;
        arr.extend_to(len)?;
        let rc = Rc::new(arr);
        self.cache.insert(key, rc.clone());
        Ok(rc)
    }

    pub fn y(&self, r: &Rational) -> Result<i64> {
        y_units(r, self.denom)
    }

    pub fn meta(&self, ring: Ring) -> TruncationMeta {
        TruncationMeta {
            denom: self.denom,
            order_x: self.order_x,
            cutoff_y: ring.cutoff,
            bound: self.bound(ring),
            s_max: self.smax.clone(),
            bound_scale: self.scale,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn set(s: &str) -> ShiftSet {
        s.parse().unwrap()
    }

    /// Oracle: enumerate compositions of `n` into `k` parts directly.
    fn tau_by_compositions(a: &ShiftSet, n: usize, ring: Ring) -> QSeries {
        fn rec(i: usize, left: usize, acc: Rational, a: &[Rational], out: &mut Vec<Rational>) {
            if i + 1 == a.len() {
                out.push(&acc + &(&a[i] * &Rational::from_int(left as i64)));
                return;
            }
            for e in 0..=left {
                rec(i + 1, left - e, &acc + &(&a[i] * &Rational::from_int(e as i64)), a, out);
            }
        }
        if a.is_empty() {
            return if n == 0 { QSeries::one(ring) } else { QSeries::zero(ring) };
        }
        let mut exps = Vec::new();
        rec(0, n, Rational::ZERO, a.shifts(), &mut exps);
        QSeries::from_terms(
            ring,
            exps.iter().map(|e| (y_units(e, ring.denom).unwrap(), Rational::ONE)),
        )
        .unwrap()
    }

    #[test]
    fn tau_examples() {
        for n in 0..6 {
            assert_eq!(local_tau(&set("0"), n).terms(), &[(0, Rational::ONE)]);
        }
        let t = local_tau(&set("1/2, -1/2"), 1);
        assert_eq!(t.ring().denom, 2);
        assert_eq!(t.terms(), &[(-1, Rational::ONE), (1, Rational::ONE)]);
        let t = local_tau(&set("0, 1/5"), 2);
        assert_eq!(
            t.terms(),
            &[(0, Rational::ONE), (1, Rational::ONE), (2, Rational::ONE)]
        );
        assert!(local_tau(&ShiftSet::empty("e"), 0) == QSeries::one(t_ring(1)));
        assert!(local_tau(&ShiftSet::empty("e"), 3).is_zero());
    }

    fn t_ring(d: u32) -> Ring {
        Ring::with_floor(d, 0, 0)
    }

    #[test]
    fn tau_matches_compositions() {
        let a = set("1/3, -1/4, 1/6");
        let ring = Ring::with_floor(12, 40, -40);
        for n in 0..7 {
            assert_eq!(local_tau_in(&a, n, ring).unwrap(), tau_by_compositions(&a, n, ring));
        }
    }

    #[test]
    fn shift_adjust_examples() {
        let a = set("1/3, -1/4");
        assert_eq!(shift_adjust(&a, &Rational::ZERO).unwrap(), a);
        let z = shift_adjust(&set("0"), &Rational::new(1, 2).unwrap()).unwrap();
        assert_eq!(local_tau(&z, 3).terms(), &[(3, Rational::ONE)]);
        assert!(matches!(
            shift_adjust(&set("0, 1/2"), &Rational::ONE).map(|s| s.len()),
            Ok(2)
        ));
    }

    #[test]
    fn a_plus_examples() {
        let ring = Ring::with_floor(5, 30, -30);
        let mut e = LocalArray::new(&ShiftSet::empty("e"), ring).unwrap();
        e.extend_to(6).unwrap();
        let p = a_plus(&e).unwrap();
        assert!(p.values().iter().all(|v| *v == QSeries::one(ring)));

        let mut a = LocalArray::new(&set("1/5"), ring).unwrap();
        a.extend_to(6).unwrap();
        let p = a_plus(&a).unwrap();
        for (d, v) in p.values().iter().enumerate() {
            let expect = QSeries::from_terms(ring, (0..=d as i64).map(|j| (j, Rational::ONE))).unwrap();
            assert_eq!(*v, expect);
        }

        let mut z = LocalArray::new(&set("0, 1/5"), ring).unwrap();
        z.extend_to(2).unwrap();
        assert!(matches!(a_plus(&z), Err(Error::DuplicateShift(_))));
    }

    #[test]
    fn off_grid_shift_rejected() {
        let ring = Ring::new(4, 10);
        assert!(LocalArray::new(&set("1/3"), ring).is_err());
    }

    #[test]
    fn bound_formula() {
        let cfg = LocalConfig::default();
        let shifts = [Rational::new(5, 12).unwrap()];
        let ctx = Ctx::new(&cfg, shifts.iter()).unwrap();
        // 12 / (1 - 10/12) = 72
        assert_eq!(ctx.bound(ctx.ring(0)), 74);
        let ctx2 = Ctx::new(&cfg.doubled(), shifts.iter()).unwrap();
        assert_eq!(ctx2.bound(ctx2.ring(0)), 148);
        let half = [Rational::new(-1, 2).unwrap()];
        assert!(matches!(Ctx::new(&cfg, half.iter()), Err(Error::TailBoundViolation(_))));
    }
}
