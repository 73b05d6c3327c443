//! Generalized divisor functions and truncated Dirichlet series.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::sieve::SieveTable;
use crate::error::Result;
use crate::shifts::NumericShiftSet;

/// `tau_A(p^e)`: convolution of the geometric sequences `p^{-j a}`.
pub fn tau_prime_power(shifts: &[f64], p: f64, e: u32) -> f64 {
    let e = e as usize;
    let mut cur = vec![0.0; e + 1];
    cur[0] = 1.0;
    for &a in shifts {
        let r = p.powf(-a);
        for n in 1..=e {
            cur[n] += r * cur[n - 1];
        }
    }
    cur[e]
}

/// `tau_A(n)` by factoring `n` with the sieve.
pub fn tau_global(a: &NumericShiftSet, n: u64, sieve: &SieveTable) -> Result<f64> {
    Ok(sieve
        .factorize(n)?
        .iter()
        .map(|&(p, e)| tau_prime_power(a.shifts(), p as f64, e))
        .product())
}

/// `tau_A(n)` for every `1 <= n <= x`; index 0 holds 0.
#[derive(Clone, Debug)]
pub struct TauTable {
    values: Vec<f64>,
}

impl TauTable {
    pub fn new(a: &NumericShiftSet, x: u64, sieve: &SieveTable) -> Result<Self> {
        sieve.check(x.max(1))?;
        let n = x as usize;
        let mut values = vec![0.0; n + 1];
        if n >= 1 {
            values[1] = 1.0;
        }
        for m in 2..=n {
            let (p, e, rest) = sieve.split_smallest(m);
            values[m] = values[rest] * tau_prime_power(a.shifts(), p as f64, e);
        }
        Ok(TauTable { values })
    }

    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Pairwise summation with a fixed tree (leaves of 32 terms).
pub fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    if v.len() <= 32 {
        let mut s = Complex64::new(0.0, 0.0);
        for x in v {
            s += x;
        }
        return s;
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Real counterpart of [`pairwise_sum`].
pub fn pairwise_sum_real(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum_real(&v[..mid]) + pairwise_sum_real(&v[mid..])
}

/// `D_A(s; X) = sum_{n <= X} tau_A(n) n^{-s}`.
pub fn dirichlet_poly(a: &NumericShiftSet, s: Complex64, x: u64, sieve: &SieveTable) -> Result<Complex64> {
    if x == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let tab = TauTable::new(a, x, sieve)?;
    Ok(dirichlet_poly_table(&tab, s))
}

/// Same sum from a precomputed table (all of it).
pub fn dirichlet_poly_table(tab: &TauTable, s: Complex64) -> Complex64 {
    let terms: Vec<Complex64> = (1..=tab.len())
        .map(|n| {
            let ln = (n as f64).ln();
            (-s * ln).exp() * tab.get(n)
        })
        .collect();
    pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::arith::divisors;

    #[test]
    fn tau_examples() {
        let s = SieveTable::new(20_000).unwrap();
        let d = NumericShiftSet::new_coincident(vec![0.0, 0.0]).unwrap();
        assert_eq!(tau_global(&d, 12, &s).unwrap(), 6.0);
        let one = NumericShiftSet::new(vec![0.0]).unwrap();
        for n in 1..200 {
            assert_eq!(tau_global(&one, n, &s).unwrap(), 1.0);
        }
        let (al, be) = (0.13, -0.21);
        let ab = NumericShiftSet::new(vec![al, be]).unwrap();
        let expect = (2f64.powf(-al) + 2f64.powf(-be)) * (3f64.powf(-al) + 3f64.powf(-be));
        assert!((tau_global(&ab, 6, &s).unwrap() - expect).abs() < 1e-14);
        assert!(tau_global(&one, 20_001, &s).is_err());
    }

    #[test]
    fn table_is_divisor_count() {
        let s = SieveTable::new(10_000).unwrap();
        let d = NumericShiftSet::new_coincident(vec![0.0, 0.0]).unwrap();
        let t = TauTable::new(&d, 10_000, &s).unwrap();
        for n in 1..=10_000u64 {
            assert_eq!(t.get(n as usize), divisors(n).len() as f64);
        }
    }

    #[test]
    fn multiplicative_on_coprime_pairs() {
        let s = SieveTable::new(1_000_000).unwrap();
        let a = NumericShiftSet::new(vec![0.11, -0.07, 0.3]).unwrap();
        let t = TauTable::new(&a, 1_000_000, &s).unwrap();
        for m in 1..=1000usize {
            for n in (1..=1000usize).filter(|n| crate::numeric::arith::gcd(m as u64, *n as u64) == 1) {
                let lhs = t.get(m * n);
                let rhs = t.get(m) * t.get(n);
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn dirichlet_examples() {
        let s = SieveTable::new(100).unwrap();
        let one = NumericShiftSet::new(vec![0.0]).unwrap();
        let v = dirichlet_poly(&one, Complex64::new(2.0, 0.0), 4, &s).unwrap();
        assert!((v.re - (1.0 + 0.25 + 1.0 / 9.0 + 1.0 / 16.0)).abs() < 1e-15);
        let v = dirichlet_poly(&one, Complex64::new(0.5, 3.0), 1, &s).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
        let a = NumericShiftSet::new(vec![0.1, -0.2]).unwrap();
        let z = Complex64::new(0.5, 7.0);
        let l = dirichlet_poly(&a, z, 90, &s).unwrap().conj();
        let r = dirichlet_poly(&a, z.conj(), 90, &s).unwrap();
        assert!((l - r).norm() < 1e-13);
    }
}
