//! `B(A, B, s) = sum tau_A(n) tau_B(n) n^{-s}` through its Euler product.
//!
//! With `x = p^{-s}`, `y_i = p^{-a_i}`, `z_j = p^{-b_j}` the local factor is
//! `F_p = sum_j h_j(y) h_j(z) x^j = E_p(x) / prod (1 - x y_i z_j)` where `E_p` is a
//! polynomial of degree below `|A| |B|`. Hence
//! `B = prod zeta(s + a + b) * prod_p E_p(p^{-s})`.
//! Primes up to `P` are multiplied in directly. Beyond `P`, `log E_p` is expanded
//! in monomials `c p^{-e}` and each monomial is summed over `p > P` with the
//! prime zeta function.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::arith::mobius;
use super::dirichlet::tau_prime_power;
use super::sieve::SieveTable;
use super::zeta::{zeta_minus_one, zeta_num};
use crate::error::{Error, Result};
use crate::shifts::NumericShiftSet;

/// Default prime limit for the directly multiplied part.
pub const DEFAULT_PRIME_LIMIT: u64 = 20_000;
const MAX_DEGREE: usize = 40;
const MAX_VARS: usize = 8;

/// Value of the Euler product with bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerValue {
    pub value: f64,
    pub error: f64,
    /// highest degree of the `log E_p` expansion used for the tail
    pub degree: usize,
    pub prime_limit: u64,
}

/// `B(A, B, s)` with the default prime limit.
pub fn euler_b(a: &NumericShiftSet, b: &NumericShiftSet, s: f64) -> Result<f64> {
    Ok(euler_b_with(a, b, s, DEFAULT_PRIME_LIMIT)?.value)
}

/// Prime zeta function `P(e) = sum_p p^{-e}` for `e > 1`.
pub fn prime_zeta(e: f64) -> Result<f64> {
    if !(e > 1.0) {
        return Err(Error::DivergentSeries(format!("prime zeta at {e}")));
    }
    let mut sum = 0.0;
    let mut k = 1u64;
    loop {
        let ke = k as f64 * e;
        if ke > 2.0 && (-ke * core::f64::consts::LN_2).exp() < 1e-20 {
            break;
        }
        let mu = mobius(k);
        if mu != 0 {
            let lz = zeta_minus_one(ke)?.ln_1p();
            sum += mu as f64 * lz / k as f64;
        }
        k += 1;
    }
    Ok(sum)
}

/// Homogeneous component: sorted `(packed exponents, coefficient)` pairs.
type Hom = Vec<(u64, f64)>;

fn pack(exps: &[u32]) -> u64 {
    exps.iter().enumerate().fold(0u64, |k, (i, e)| k | ((*e as u64) << (8 * i)))
}

fn unpack(key: u64, nv: usize) -> Vec<u32> {
    (0..nv).map(|i| ((key >> (8 * i)) & 0xff) as u32).collect()
}

/// Weak compositions of `j` into `parts` parts.
fn compositions(j: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if j == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if parts == 1 {
        return vec![vec![j]];
    }
    let mut out = Vec::new();
    for first in (0..=j).rev() {
        for mut rest in compositions(j - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn normalize(mut v: Hom) -> Hom {
    v.sort_unstable_by_key(|t| t.0);
    let mut out: Hom = Vec::with_capacity(v.len());
    for (k, c) in v {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 += c,
            _ => out.push((k, c)),
        }
    }
    out.retain(|t| t.1 != 0.0);
    out
}

fn mul_hom(p: &Hom, q: &Hom) -> Hom {
    let mut v = Vec::with_capacity(p.len() * q.len());
    for (kp, cp) in p {
        for (kq, cq) in q {
            v.push((kp + kq, cp * cq));
        }
    }
    normalize(v)
}

/// Degree-`j` parts of `log E` for `j = 0..=max_deg`.
fn log_e_components(ka: usize, kb: usize, max_deg: usize) -> Vec<Hom> {
    // F_j = h_j(y) h_j(z)
    let mut f: Vec<Hom> = Vec::with_capacity(max_deg + 1);
    for j in 0..=max_deg as u32 {
        let ya = compositions(j, ka);
        let zb = compositions(j, kb);
        let mut h = Vec::with_capacity(ya.len() * zb.len());
        for a in &ya {
            for b in &zb {
                let mut e = a.clone();
                e.extend_from_slice(b);
                h.push((pack(&e), 1.0));
            }
        }
        f.push(normalize(h));
    }
    // L = log F by j L_j = j F_j - sum_{i<j} i L_i F_{j-i}
    let mut l: Vec<Hom> = vec![Vec::new(); max_deg + 1];
    let mut out: Vec<Hom> = vec![Vec::new(); max_deg + 1];
    for j in 1..=max_deg {
        let mut acc: Hom = f[j].iter().map(|(k, c)| (*k, c * j as f64)).collect();
        for i in 1..j {
            if l[i].is_empty() {
                continue;
            }
            let prod = mul_hom(&l[i], &f[j - i]);
            acc.extend(prod.into_iter().map(|(k, c)| (k, -c * i as f64)));
        }
        let mut lj = normalize(acc);
        for t in lj.iter_mut() {
            t.1 /= j as f64;
        }
        // remove the zeta part: - (1/j) sum_{i, i'} (y_i z_i')^j
        let mut sub = Vec::with_capacity(ka * kb);
        for ia in 0..ka {
            for ib in 0..kb {
                let mut e = vec![0u32; ka + kb];
                e[ia] = j as u32;
                e[ka + ib] = j as u32;
                sub.push((pack(&e), -1.0 / j as f64));
            }
        }
        let mut ej = lj.clone();
        ej.extend(sub);
        out[j] = normalize(ej).into_iter().filter(|t| t.1.abs() > 1e-13).collect();
        l[j] = lj;
    }
    out
}

/// `B(A, B, s)` with primes up to `prime_limit` multiplied in directly.
pub fn euler_b_with(a: &NumericShiftSet, b: &NumericShiftSet, s: f64, prime_limit: u64) -> Result<EulerValue> {
    let (ka, kb) = (a.len(), b.len());
    if ka == 0 || kb == 0 {
        return Ok(EulerValue { value: 1.0, error: 0.0, degree: 0, prime_limit });
    }
    if ka + kb > MAX_VARS {
        return Err(Error::InvalidArity(format!("|A| + |B| = {} exceeds {MAX_VARS}", ka + kb)));
    }
    let (sa, sb) = (a.shifts(), b.shifts());
    let mut zeta_part = 1.0;
    for x in sa {
        for y in sb {
            let arg = s + x + y;
            if !(arg > 0.0) {
                return Err(Error::DivergentSeries(format!("zeta factor at s + a + b = {arg}")));
            }
            zeta_part *= zeta_num(arg)?;
        }
    }
    let delta = s + sa.iter().cloned().fold(f64::INFINITY, f64::min) + sb.iter().cloned().fold(f64::INFINITY, f64::min);

    let sieve = SieveTable::new(prime_limit)?;
    let primes = sieve.primes();
    let big_k = ka * kb;

    // exact part
    let mut q = vec![0.0; big_k + 1];
    let mut log_exact = 0.0;
    for &p in primes {
        let pf = p as f64;
        let x = pf.powf(-s);
        // Q(x) = prod (1 - x y z), coefficients without powers of x
        q.iter_mut().for_each(|v| *v = 0.0);
        q[0] = 1.0;
        let mut deg = 0;
        for ya in sa {
            for zb in sb {
                let w = pf.powf(-(ya + zb));
                for d in (1..=deg + 1).rev() {
                    q[d] -= w * q[d - 1];
                }
                deg += 1;
            }
        }
        let fa: Vec<f64> = (0..big_k).map(|j| tau_prime_power(sa, pf, j as u32) * tau_prime_power(sb, pf, j as u32)).collect();
        let mut em1 = 0.0;
        let mut xj = 1.0;
        for j in 1..big_k {
            xj *= x;
            let cj: f64 = (0..=j).map(|i| fa[i] * q[j - i]).sum();
            em1 += cj * xj;
        }
        log_exact += em1.ln_1p();
    }

    // tail over p > P
    let lp = (prime_limit as f64).ln();
    let tail_bound = |e: f64| -> f64 {
        if e <= 1.0 {
            f64::INFINITY
        } else {
            (prime_limit as f64).powf(1.0 - e) / ((e - 1.0) * lp)
        }
    };
    let exps = |key: u64| -> f64 {
        let ex = unpack(key, ka + kb);
        let deg: u32 = ex[..ka].iter().sum();
        let mut e = deg as f64 * s;
        for (i, v) in ex.iter().enumerate() {
            let sh = if i < ka { sa[i] } else { sb[i - ka] };
            e += *v as f64 * sh;
        }
        e
    };
    let mut degree = 2;
    let mut comps = log_e_components(ka, kb, degree);
    loop {
        let mass: f64 = comps[degree].iter().map(|t| t.1.abs()).sum();
        let bound = mass.max(1.0) * tail_bound(degree as f64 * delta);
        if degree >= 3 && bound < 1e-17 {
            break;
        }
        if degree >= MAX_DEGREE {
            return Err(Error::TailBoundViolation(format!(
                "Euler product tail needs degree beyond {MAX_DEGREE} (s = {s})"
            )));
        }
        degree += 1;
        comps = log_e_components(ka, kb, degree);
    }
    let last_mass: f64 = comps[degree].iter().map(|t| t.1.abs()).sum();
    let dropped = 2.0 * last_mass.max(1.0) * tail_bound((degree + 1) as f64 * delta);

    let mut log_tail = 0.0;
    let mut err = dropped;
    for comp in comps.iter().skip(2) {
        for (key, c) in comp {
            let e = exps(*key);
            if e <= 1.0 {
                return Err(Error::DivergentSeries(format!(
                    "local factor term p^-{e} does not converge (s = {s})"
                )));
            }
            if c.abs() * tail_bound(e) < 1e-19 {
                err += c.abs() * tail_bound(e);
                continue;
            }
            let head: f64 = primes.iter().map(|&p| (p as f64).powf(-e)).sum();
            let pz = prime_zeta(e)?;
            log_tail += c * (pz - head);
            err += c.abs() * 1e-13 * pz.abs().max(1.0);
        }
    }
    let value = zeta_part * (log_exact + log_tail).exp();
    let rel = err + 1e-12 * (big_k as f64 + 1.0);
    Ok(EulerValue { value, error: value.abs() * rel, degree, prime_limit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::dirichlet::TauTable;
    use core::f64::consts::PI;

    fn ns(v: &[f64]) -> NumericShiftSet {
        NumericShiftSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn singletons() {
        let v = euler_b(&ns(&[0.0]), &ns(&[0.0]), 2.0).unwrap();
        assert!((v - PI * PI / 6.0).abs() < 1e-12);
        let v = euler_b(&ns(&[0.3]), &ns(&[-0.3]), 2.0).unwrap();
        assert!((v - PI * PI / 6.0).abs() < 1e-12);
        let v = euler_b(&ns(&[0.1]), &ns(&[0.25]), 1.0).unwrap();
        assert!((v - zeta_num(1.35).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn prime_zeta_values() {
        // Oracle: mpmath primezeta
        assert!((prime_zeta(2.0).unwrap() - 0.452_247_420_041_065_5).abs() < 1e-12);
        assert!((prime_zeta(1.1).unwrap() - 2.108_843_690_332_092).abs() < 1e-10);
        assert!(prime_zeta(1.0).is_err());
    }

    #[test]
    fn two_by_two_closed_form() {
        // For |A| = |B| = 2 the polynomial E_p is 1 - p^{-(2s + sum A + sum B)}.
        for (a, b, s) in [
            ([0.1, -0.05], [0.2, 0.03], 1.0),
            ([-0.2, 0.15], [0.1, -0.12], 1.0),
            ([0.3, 0.1], [0.2, 0.25], 0.6),
        ] {
            let v = euler_b_with(&ns(&a), &ns(&b), s, 10_000).unwrap();
            let mut expect = 1.0;
            for x in a {
                for y in b {
                    expect *= zeta_num(s + x + y).unwrap();
                }
            }
            expect /= zeta_num(2.0 * s + a.iter().sum::<f64>() + b.iter().sum::<f64>()).unwrap();
            assert!((v.value - expect).abs() < 1e-10 * expect.abs(), "{v:?} {expect}");
            assert!(v.error < 1e-9 * expect.abs());
        }
    }

    #[test]
    fn direct_sum_oracle() {
        let s_val = 3.0;
        let (a, b) = (ns(&[0.1, -0.2]), ns(&[0.05, 0.15, -0.1]));
        let n = 1_000_000u64;
        let sieve = SieveTable::new(n).unwrap();
        let ta = TauTable::new(&a, n, &sieve).unwrap();
        let tb = TauTable::new(&b, n, &sieve).unwrap();
        let mut direct = 0.0;
        for m in (1..=n as usize).rev() {
            direct += ta.get(m) * tb.get(m) * (m as f64).powf(-s_val);
        }
        let v = euler_b(&a, &b, s_val).unwrap();
        assert!((v - direct).abs() < 1e-6 * v, "{v} {direct}");
    }

    #[test]
    fn doubling_prime_limit() {
        let (a, b) = (ns(&[0.11, -0.07, 0.02]), ns(&[0.09, -0.13]));
        for s in [1.0, 0.85] {
            let v1 = euler_b_with(&a, &b, s, 10_000).unwrap();
            let v2 = euler_b_with(&a, &b, s, 20_000).unwrap();
            assert!((v1.value - v2.value).abs() < 1e-12 * v1.value.abs(), "{v1:?} {v2:?}");
        }
    }

    #[test]
    fn divergence() {
        assert!(matches!(euler_b(&ns(&[-0.4]), &ns(&[-0.4]), 0.5), Err(Error::DivergentSeries(_))));
        assert!(matches!(euler_b(&ns(&[0.0]), &ns(&[0.0]), 1.0), Err(Error::PoleProximity(_))));
        // 2s + sum = 0.9 < 1 for the degree-two term
        let r = euler_b(&ns(&[-0.3, -0.2]), &ns(&[-0.1, 0.0]), 0.75);
        assert!(matches!(r, Err(Error::DivergentSeries(_))), "{r:?}");
    }
}
