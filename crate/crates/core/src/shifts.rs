//! Shift sets, swaps and ordered partitions.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::rational::{lcm_u64, Rational};

/// An ordered set of distinct exact shifts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShiftSet {
    shifts: Vec<Rational>,
    label: String,
}

fn half() -> Rational {
    Rational::new(1, 2).unwrap()
}

impl ShiftSet {
    /// Distinct shifts with `|shift| <= 1/2`.
    pub fn new(shifts: Vec<Rational>, label: &str) -> Result<Self> {
        let h = half();
        if let Some(s) = shifts.iter().find(|s| s.abs() > h) {
            return Err(Error::ShiftOutOfRange(s.to_string()));
        }
        Self::new_unbounded(shifts, label)
    }

    /// Distinctness only; used for translated sets that may leave `[-1/2, 1/2]`.
    pub fn new_unbounded(shifts: Vec<Rational>, label: &str) -> Result<Self> {
        for (i, s) in shifts.iter().enumerate() {
            if shifts[..i].contains(s) {
                return Err(Error::DuplicateShift(s.to_string()));
            }
        }
        Ok(ShiftSet {
            shifts,
            label: label.into(),
        })
    }

    pub fn empty(label: &str) -> Self {
        ShiftSet {
            shifts: Vec::new(),
            label: label.into(),
        }
    }

    /// Convenience constructor from `(num, den)` pairs.
    pub fn from_pairs(pairs: &[(i64, i64)], label: &str) -> Result<Self> {
        let v = pairs
            .iter()
            .map(|&(n, d)| Rational::new(n, d))
            .collect::<Result<Vec<_>>>()?;
        Self::new(v, label)
    }

    pub fn shifts(&self) -> &[Rational] {
        &self.shifts
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn contains(&self, s: &Rational) -> bool {
        self.shifts.contains(s)
    }

    /// Largest absolute shift, zero for the empty set.
    pub fn max_abs(&self) -> Rational {
        self.shifts
            .iter()
            .map(Rational::abs)
            .max()
            .unwrap_or(Rational::ZERO)
    }

    /// Appends `extra`, failing on collisions.
    pub fn union(&self, extra: &[Rational]) -> Result<Self> {
        let mut v = self.shifts.clone();
        v.extend(extra.iter().cloned());
        Self::new_unbounded(v, &self.label)
    }

    /// Concatenation of several sets, failing on collisions.
    pub fn union_all(sets: &[&ShiftSet], label: &str) -> Result<Self> {
        let v: Vec<Rational> = sets.iter().flat_map(|s| s.shifts.iter().cloned()).collect();
        Self::new_unbounded(v, label)
    }

    /// `{a + alpha : a in A}`.
    pub fn translate(&self, alpha: &Rational) -> Result<Self> {
        let v = self.shifts.iter().map(|a| a + alpha).collect();
        Self::new_unbounded(v, &self.label)
    }

    /// Lower to floating point. There is no way back.
    pub fn to_numeric(&self) -> NumericShiftSet {
        NumericShiftSet {
            shifts: self.shifts.iter().map(Rational::to_f64).collect(),
            coincident_ok: false,
        }
    }

    /// Canonical key: sorted shifts. Two sets with equal keys have equal `tau`.
    pub fn key(&self) -> Vec<Rational> {
        let mut v = self.shifts.clone();
        v.sort();
        v
    }
}

impl FromStr for ShiftSet {
    type Err = Error;

    /// Comma separated rational literals; an empty string is the empty set.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Ok(ShiftSet::empty(""));
        }
        let v = t
            .split(',')
            .map(|x| x.parse::<Rational>())
            .collect::<Result<Vec<_>>>()?;
        ShiftSet::new(v, "")
    }
}

impl core::fmt::Display for ShiftSet {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.shifts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

/// Real shifts for the floating point path.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericShiftSet {
    shifts: Vec<f64>,
    coincident_ok: bool,
}

impl NumericShiftSet {
    /// Distinct finite shifts with `|shift| <= 1/2`.
    pub fn new(shifts: Vec<f64>) -> Result<Self> {
        Self::build(shifts, false)
    }

    /// Same range check, but repeated values are allowed (e.g. `{0, 0}` for `d(n)`).
    pub fn new_coincident(shifts: Vec<f64>) -> Result<Self> {
        Self::build(shifts, true)
    }

    fn build(shifts: Vec<f64>, coincident_ok: bool) -> Result<Self> {
        for (i, s) in shifts.iter().enumerate() {
            if !s.is_finite() || s.abs() > 0.5 {
                return Err(Error::ShiftOutOfRange(format!("{s}")));
            }
            if !coincident_ok && shifts[..i].contains(s) {
                return Err(Error::DuplicateShift(format!("{s}")));
            }
        }
        Ok(NumericShiftSet {
            shifts,
            coincident_ok,
        })
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn coincident_ok(&self) -> bool {
        self.coincident_ok
    }

    pub fn has_coincident(&self) -> bool {
        self.shifts
            .iter()
            .enumerate()
            .any(|(i, s)| self.shifts[..i].contains(s))
    }

    pub fn max_abs(&self) -> f64 {
        self.shifts.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    pub fn sum(&self) -> f64 {
        self.shifts.iter().sum()
    }
}

/// Which elements of `A` and `B` are swapped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SwapSelection {
    pub u_indices: Vec<usize>,
    pub v_indices: Vec<usize>,
}

impl SwapSelection {
    pub fn new(u_indices: Vec<usize>, v_indices: Vec<usize>) -> Self {
        SwapSelection {
            u_indices,
            v_indices,
        }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new())
    }

    pub fn size(&self) -> usize {
        self.u_indices.len()
    }

    pub fn validate(&self, ka: usize, kb: usize) -> Result<()> {
        if self.u_indices.len() != self.v_indices.len() {
            return Err(Error::InvalidSelection("|U| != |V|".into()));
        }
        for (idx, k) in [(&self.u_indices, ka), (&self.v_indices, kb)] {
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidSelection("indices not increasing".into()));
            }
            if idx.iter().any(|&i| i >= k) {
                return Err(Error::InvalidSelection("index out of range".into()));
            }
        }
        Ok(())
    }

    /// All selections with `|U| = |V| = size`, in lexicographic order.
    pub fn all_of_size(ka: usize, kb: usize, size: usize) -> Vec<SwapSelection> {
        let us = subsets_of_size(ka, size);
        let vs = subsets_of_size(kb, size);
        let mut out = Vec::with_capacity(us.len() * vs.len());
        for u in &us {
            for v in &vs {
                out.push(SwapSelection::new(u.clone(), v.clone()));
            }
        }
        out
    }
}

/// Increasing index lists of the given size drawn from `0..n`.
pub fn subsets_of_size(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < left {
                break;
            }
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= n {
        rec(0, n, size, &mut Vec::new(), &mut out);
    }
    out
}

fn swap_generic<T: Clone, F: Fn(&T) -> T>(a: &[T], b: &[T], sel: &SwapSelection, neg: F) -> (Vec<T>, Vec<T>) {
    let mut na: Vec<T> = (0..a.len())
        .filter(|i| !sel.u_indices.contains(i))
        .map(|i| a[i].clone())
        .collect();
    let mut nb: Vec<T> = (0..b.len())
        .filter(|i| !sel.v_indices.contains(i))
        .map(|i| b[i].clone())
        .collect();
    na.extend(sel.v_indices.iter().map(|&i| neg(&b[i])));
    nb.extend(sel.u_indices.iter().map(|&i| neg(&a[i])));
    (na, nb)
}

/// `(A - U + V^-, B - V + U^-)`.
pub fn swap_transform(a: &ShiftSet, b: &ShiftSet, sel: &SwapSelection) -> Result<(ShiftSet, ShiftSet)> {
    sel.validate(a.len(), b.len())?;
    let (na, nb) = swap_generic(a.shifts(), b.shifts(), sel, |x| -x.clone());
    Ok((
        ShiftSet::new_unbounded(na, a.label())?,
        ShiftSet::new_unbounded(nb, b.label())?,
    ))
}

/// Numeric counterpart of [`swap_transform`]; collisions are reported unless
/// the inputs were flagged as coincident.
pub fn swap_transform_numeric(
    a: &NumericShiftSet,
    b: &NumericShiftSet,
    sel: &SwapSelection,
) -> Result<(NumericShiftSet, NumericShiftSet)> {
    sel.validate(a.len(), b.len())?;
    let (na, nb) = swap_generic(a.shifts(), b.shifts(), sel, |x| -*x);
    let ok = a.coincident_ok && b.coincident_ok;
    let na = NumericShiftSet::build(na, ok).map_err(|e| Error::SwapCollision(e.to_string()))?;
    let nb = NumericShiftSet::build(nb, ok).map_err(|e| Error::SwapCollision(e.to_string()))?;
    Ok((na, nb))
}

/// Labelled partition of `0..k` into `ell` nonempty blocks; labels are `0..ell`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderedPartition {
    pub block_of: Vec<usize>,
    pub ell: usize,
}

impl OrderedPartition {
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = alloc::vec![Vec::new(); self.ell];
        for (i, &b) in self.block_of.iter().enumerate() {
            out[b].push(i);
        }
        out
    }

    /// Split a shift set along the partition.
    pub fn apply(&self, set: &ShiftSet) -> Result<Vec<ShiftSet>> {
        if set.len() != self.block_of.len() {
            return Err(Error::InvalidArity("partition size differs from set size".into()));
        }
        self.blocks()
            .into_iter()
            .enumerate()
            .map(|(j, idx)| {
                ShiftSet::new_unbounded(
                    idx.iter().map(|&i| set.shifts()[i].clone()).collect(),
                    &format!("{}_{}", set.label(), j + 1),
                )
            })
            .collect()
    }
}

/// All surjections `0..k -> 0..ell`, in lexicographic order of `block_of`.
pub fn enumerate_ordered_partitions(k: usize, ell: usize) -> Result<Vec<OrderedPartition>> {
    if ell == 0 || ell > k {
        return Err(Error::InvalidArity(format!("k={k}, ell={ell}")));
    }
    fn rec(pos: usize, k: usize, ell: usize, used: &mut [usize], n_used: usize, cur: &mut Vec<usize>, out: &mut Vec<OrderedPartition>) {
        if pos == k {
            if n_used == ell {
                out.push(OrderedPartition {
                    block_of: cur.clone(),
                    ell,
                });
            }
            return;
        }
        if ell - n_used > k - pos {
            return;
        }
        for b in 0..ell {
            used[b] += 1;
            let nu = n_used + usize::from(used[b] == 1);
            cur.push(b);
            rec(pos + 1, k, ell, used, nu, cur, out);
            cur.pop();
            used[b] -= 1;
        }
    }
    let mut out = Vec::new();
    rec(0, k, ell, &mut alloc::vec![0; ell], 0, &mut Vec::with_capacity(k), &mut out);
    Ok(out)
}

/// Least common multiple of every shift denominator across the given sets.
pub fn common_denominator(sets: &[&ShiftSet]) -> u64 {
    common_denominator_of(sets.iter().flat_map(|s| s.shifts().iter()))
}

/// Same as [`common_denominator`] over a bare iterator of rationals.
pub fn common_denominator_of<'a, I: IntoIterator<Item = &'a Rational>>(it: I) -> u64 {
    it.into_iter()
        .map(|r| r.denom_u64().expect("shift denominator exceeds u64"))
        .fold(1, lcm_u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> ShiftSet {
        s.parse().unwrap()
    }

    #[test]
    fn construction_rules() {
        assert!(matches!("0,0".parse::<ShiftSet>(), Err(Error::DuplicateShift(_))));
        assert!(matches!("2/3".parse::<ShiftSet>(), Err(Error::ShiftOutOfRange(_))));
        assert!(set("1/2, -1/2").len() == 2);
        assert!(NumericShiftSet::new(alloc::vec![0.0, 0.0]).is_err());
        assert!(NumericShiftSet::new_coincident(alloc::vec![0.0, 0.0]).is_ok());
        assert!(NumericShiftSet::new(alloc::vec![0.6]).is_err());
    }

    #[test]
    fn swap_examples() {
        let (a, b) = (set("1/5"), set("1/7"));
        let (x, y) = swap_transform(&a, &b, &SwapSelection::new(alloc::vec![0], alloc::vec![0])).unwrap();
        assert_eq!(x.shifts(), set("-1/7").shifts());
        assert_eq!(y.shifts(), set("-1/5").shifts());

        let (x, y) = swap_transform(&a, &b, &SwapSelection::empty()).unwrap();
        assert_eq!((x, y), (a, b));

        let (a, b) = (set("1/5, 1/3"), set("1/7, 1/11"));
        let (x, y) = swap_transform(&a, &b, &SwapSelection::new(alloc::vec![1], alloc::vec![0])).unwrap();
        assert_eq!(x.shifts(), set("1/5, -1/7").shifts());
        assert_eq!(y.shifts(), set("1/11, -1/3").shifts());
    }

    #[test]
    fn swap_collision() {
        let (a, b) = (set("1/5, -1/7"), set("1/7"));
        let r = swap_transform(&a, &b, &SwapSelection::new(alloc::vec![0], alloc::vec![0]));
        assert!(matches!(r, Err(Error::DuplicateShift(_))));
        let bad = SwapSelection::new(alloc::vec![0], alloc::vec![]);
        assert!(matches!(swap_transform(&a, &b, &bad), Err(Error::InvalidSelection(_))));
    }

    #[test]
    fn partition_counts() {
        assert_eq!(enumerate_ordered_partitions(2, 2).unwrap().len(), 2);
        assert_eq!(enumerate_ordered_partitions(3, 2).unwrap().len(), 6);
        assert_eq!(enumerate_ordered_partitions(3, 1).unwrap().len(), 1);
        assert!(enumerate_ordered_partitions(2, 3).is_err());
        assert!(enumerate_ordered_partitions(2, 0).is_err());
    }

    #[test]
    fn partition_matches_label_map_filter() {
        // Oracle: all ell^k label maps, keep the surjective ones.
        for k in 1..=5usize {
            for ell in 1..=k {
                let mut expect = Vec::new();
                for code in 0..ell.pow(k as u32) {
                    let mut c = code;
                    let mut m = Vec::new();
                    for _ in 0..k {
                        m.push(c % ell);
                        c /= ell;
                    }
                    m.reverse();
                    if (0..ell).all(|b| m.contains(&b)) {
                        expect.push(m);
                    }
                }
                let got: Vec<_> = enumerate_ordered_partitions(k, ell)
                    .unwrap()
                    .into_iter()
                    .map(|p| p.block_of)
                    .collect();
                assert_eq!(got, expect);
            }
        }
    }

    #[test]
    fn denominators() {
        assert_eq!(common_denominator(&[&set("1/3, -1/2")]), 6);
        assert_eq!(common_denominator(&[&set("0")]), 1);
        assert_eq!(common_denominator(&[&set("1/4"), &set("1/6")]), 12);
    }
}
