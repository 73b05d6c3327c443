//! Delta-method main term for shifted convolution sums and its empirical counterpart.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::arith::{divisors, factor, gcd};
use super::dirichlet::TauTable;
use super::sieve::SieveTable;
use super::zeta::zeta_num;
use super::{fmt_shifts, Method, MomentReport};
use crate::error::{Error, Result};
use crate::shifts::NumericShiftSet;

/// Default truncation of the `q`-sum.
pub const DEFAULT_Q_MAX: u64 = 10_000;
/// Default half-width of the empirical window, relative to `u`.
pub const DEFAULT_DELTA: f64 = 0.05;
/// Perturbation step used when shifts coincide.
pub const DEFAULT_ETA: f64 = 1e-3;
const COINCIDENCE: f64 = 1e-6;

/// Local value `G_A(1 - alpha, p^r)` and a bound for the truncated series tail.
pub fn g_factor_with_tail(shifts: &[f64], alpha_index: usize, p: u64, r: u32) -> Result<(f64, f64)> {
    let alpha = shifts[alpha_index];
    let rest: Vec<f64> = shifts
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != alpha_index)
        .map(|(_, v)| *v)
        .collect();
    if rest.is_empty() {
        return Ok((if r == 0 { 1.0 } else { 0.0 }, 0.0));
    }
    let pf = p as f64;
    let kp = rest.len();
    let prefactor: f64 = rest.iter().map(|a| 1.0 - pf.powf(-(1.0 + a - alpha))).product();
    let decay = pf.powf(-(1.0 - alpha));
    let grow = pf.powf(rest.iter().fold(0.0f64, |m, a| m.max(-a)));
    if decay * grow >= 1.0 {
        return Err(Error::TailBoundViolation(format!(
            "G series at p = {p} does not decay (alpha = {alpha})"
        )));
    }
    // tau_{A'}(p^n) for n = 0.. by convolution, extended on demand
    let ratios: Vec<f64> = rest.iter().map(|a| pf.powf(-a)).collect();
    let mut tau = vec![1.0];
    let extend = |tau: &mut Vec<f64>| {
        let n = tau.len();
        // h_n(ratios) via the recurrence over variables
        let mut cur = vec![0.0; n + 1];
        cur[0] = 1.0;
        for &x in &ratios {
            for i in 1..=n {
                cur[i] += x * cur[i - 1];
            }
        }
        tau.push(cur[n]);
    };
    let binom = |n: u64, k: u64| -> f64 {
        let mut v = 1.0;
        for i in 0..k {
            v = v * (n - i) as f64 / (i + 1) as f64;
        }
        v
    };
    let mut sum = 0.0;
    let mut pw = 1.0;
    for j in 0..400u32 {
        while tau.len() <= (j + r) as usize {
            extend(&mut tau);
        }
        sum += tau[(j + r) as usize] * pw;
        // bound on every later term via binomial growth of h_n
        let n = (j + r + 1) as u64;
        let next = binom(n + kp as u64 - 1, kp as u64 - 1) * grow.powi(n as i32) * pw * decay;
        let next2 = binom(n + kp as u64, kp as u64 - 1) * grow.powi(n as i32 + 1) * pw * decay * decay;
        let rho = next2 / next;
        if j >= 2 && rho < 1.0 && next < 1e-17 * sum.abs().max(1e-300) {
            return Ok((prefactor * sum, prefactor.abs() * next / (1.0 - rho)));
        }
        pw *= decay;
    }
    Err(Error::TailBoundViolation(format!("G series at p = {p} needs more than 400 terms")))
}

/// `G_A(1 - alpha, p^r)`.
pub fn g_factor(shifts: &[f64], alpha_index: usize, p: u64, r: u32) -> Result<f64> {
    Ok(g_factor_with_tail(shifts, alpha_index, p, r)?.0)
}

/// `G_A(1 - alpha, n)` extended multiplicatively.
pub fn g_global(shifts: &[f64], alpha_index: usize, n: u64) -> Result<f64> {
    let mut v = 1.0;
    for (p, r) in factor(n) {
        v *= g_factor(shifts, alpha_index, p, r)?;
    }
    Ok(v)
}

struct GCache<'a> {
    shifts: &'a [f64],
    map: BTreeMap<(usize, u64, u32), f64>,
}

impl<'a> GCache<'a> {
    fn new(shifts: &'a [f64]) -> Self {
        GCache { shifts, map: BTreeMap::new() }
    }

    fn global(&mut self, idx: usize, n: u64) -> Result<f64> {
        let mut v = 1.0;
        for (p, r) in factor(n) {
            let key = (idx, p, r);
            let g = match self.map.get(&key) {
                Some(g) => *g,
                None => {
                    let g = g_factor(self.shifts, idx, p, r)?;
                    self.map.insert(key, g);
                    g
                }
            };
            if g == 0.0 {
                return Ok(0.0);
            }
            v *= g;
        }
        Ok(v)
    }
}

/// Main term for distinct shifts, truncated at `q_max`, `q_max / 2` and `q_max / 4`.
fn main_term_distinct(a: &[f64], b: &[f64], m_mod: u64, n_mod: u64, h: u64, u: f64, q_max: u64) -> Result<[f64; 3]> {
    let mu = super::arith::mobius_table(q_max as usize);
    let hdiv = divisors(h);
    let mut ga = GCache::new(a);
    let mut gb = GCache::new(b);
    let (mf, nf) = (m_mod as f64, n_mod as f64);
    let mut total = 0.0;
    let mut half = 0.0;
    let mut quarter = 0.0;
    for (ia, &al) in a.iter().enumerate() {
        let za: f64 = a
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != ia)
            .map(|(_, x)| zeta_num(1.0 + x - al))
            .product::<Result<f64>>()?;
        for (ib, &be) in b.iter().enumerate() {
            let zb: f64 = b
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != ib)
                .map(|(_, x)| zeta_num(1.0 + x - be))
                .product::<Result<f64>>()?;
            let pre = u.powf(-al - be) * mf.powf(-1.0 + be) * nf.powf(-be) * za * zb;
            let expo = 2.0 - al - be;
            let mut inner = 0.0;
            let mut inner_half = 0.0;
            let mut inner_quarter = 0.0;
            for &d in &hdiv {
                let dw = (d as f64).powf(-(1.0 - al - be));
                for q in 1..=q_max {
                    let m = mu[q as usize];
                    if m == 0 {
                        continue;
                    }
                    let qd = q * d;
                    let gm = gcd(qd, m_mod);
                    let gn = gcd(qd, n_mod);
                    let g1 = ga.global(ia, qd / gn)?;
                    if g1 == 0.0 {
                        continue;
                    }
                    let g2 = gb.global(ib, qd / gm)?;
                    let term = m as f64 * (gm as f64).powf(1.0 - be) * (gn as f64).powf(1.0 - al) * (q as f64).powf(-expo) * g1 * g2 * dw;
                    inner += term;
                    if 2 * q <= q_max {
                        inner_half += term;
                    }
                    if 4 * q <= q_max {
                        inner_quarter += term;
                    }
                }
            }
            total += pre * inner;
            half += pre * inner_half;
            quarter += pre * inner_quarter;
        }
    }
    Ok([total, half, quarter])
}

// q-terms decay like q^{-2}, so the tail is comparable to one dyadic block;
// signed blocks can cancel by accident, hence the max of two and the margin
fn q_tail(v: &[f64; 3]) -> f64 {
    2.0 * (v[0] - v[1]).abs().max((v[1] - v[2]).abs())
}

fn nearly_coincident(v: &[f64]) -> bool {
    v.iter()
        .enumerate()
        .any(|(i, x)| v[..i].iter().any(|y| (x - y).abs() < COINCIDENCE))
}

/// Delta-method main term for `<tau_A(m) tau_B(n)>` on `m N - n M = h` near `m = u`.
///
/// Coinciding shifts are handled by perturbing `a_i -> a_i + i eta`,
/// `b_j -> b_j + j eta` and extrapolating from `eta, 2 eta, 3 eta` to zero.
pub fn delta_main_term(
    a: &NumericShiftSet,
    b: &NumericShiftSet,
    m_mod: u64,
    n_mod: u64,
    h: i64,
    u: f64,
    q_max: u64,
) -> Result<MomentReport> {
    delta_main_term_with(a, b, m_mod, n_mod, h, u, q_max, DEFAULT_ETA)
}

/// [`delta_main_term`] with an explicit perturbation step.
#[allow(clippy::too_many_arguments)]
pub fn delta_main_term_with(
    a: &NumericShiftSet,
    b: &NumericShiftSet,
    m_mod: u64,
    n_mod: u64,
    h: i64,
    u: f64,
    q_max: u64,
    eta: f64,
) -> Result<MomentReport> {
    if m_mod == 0 || n_mod == 0 || gcd(m_mod, n_mod) != 1 {
        return Err(Error::InvalidArgument(format!("need coprime M, N >= 1, got ({m_mod}, {n_mod})")));
    }
    if h == 0 || !(u > 0.0) || q_max == 0 {
        return Err(Error::InvalidArgument("need h != 0, u > 0, q_max >= 1".into()));
    }
    let hh = h.unsigned_abs();
    let (sa, sb) = (a.shifts(), b.shifts());
    let (value, error, extrapolated) = if nearly_coincident(sa) || nearly_coincident(sb) {
        let eval = |e: f64| -> Result<[f64; 3]> {
            let pa: Vec<f64> = sa.iter().enumerate().map(|(i, x)| x + i as f64 * e).collect();
            let pb: Vec<f64> = sb.iter().enumerate().map(|(j, x)| x + j as f64 * e).collect();
            main_term_distinct(&pa, &pb, m_mod, n_mod, hh, u, q_max)
        };
        let f1 = eval(eta)?;
        let f2 = eval(2.0 * eta)?;
        let f3 = eval(3.0 * eta)?;
        let f4 = eval(4.0 * eta)?;
        // quadratic extrapolation, checked against the one from the shifted triple
        let v: [f64; 3] = core::array::from_fn(|i| 3.0 * f1[i] - 3.0 * f2[i] + f3[i]);
        let v_alt = 6.0 * f2[0] - 8.0 * f3[0] + 3.0 * f4[0];
        (v[0], q_tail(&v) + (v[0] - v_alt).abs(), true)
    } else {
        let v = main_term_distinct(sa, sb, m_mod, n_mod, hh, u, q_max)?;
        (v[0], q_tail(&v), false)
    };
    Ok(MomentReport::new(Method::DeltaMainTerm, Complex64::new(value, 0.0), error)
        .with("A", fmt_shifts(sa))
        .with("B", fmt_shifts(sb))
        .with("M", m_mod)
        .with("N", n_mod)
        .with("h", h)
        .with("u", u)
        .with("q_max", q_max)
        .with("extrapolated", extrapolated))
}

/// Window average `(1/(2 delta u)) sum tau_A(m) tau_B((mN - h)/M)` over `m` in
/// `[u(1-delta), u(1+delta)]` with `M | mN - h` and positive quotient.
pub fn empirical_correlation(
    a: &NumericShiftSet,
    b: &NumericShiftSet,
    m_mod: u64,
    n_mod: u64,
    h: i64,
    u: f64,
    delta: f64,
    sieve: &SieveTable,
) -> Result<MomentReport> {
    if m_mod == 0 || n_mod == 0 || gcd(m_mod, n_mod) != 1 {
        return Err(Error::InvalidArgument(format!("need coprime M, N >= 1, got ({m_mod}, {n_mod})")));
    }
    if !(delta > 0.0 && delta < 1.0) || !(u > 0.0) {
        return Err(Error::InvalidArgument("need u > 0 and 0 < delta < 1".into()));
    }
    let lo = (u * (1.0 - delta)).ceil().max(1.0) as u64;
    let hi = (u * (1.0 + delta)).floor() as u64;
    let n_hi = ((hi as i128 * n_mod as i128 - h as i128) / m_mod as i128).max(1) as u64;
    sieve.check(hi)?;
    sieve.check(n_hi)?;
    let ta = TauTable::new(a, hi, sieve)?;
    let tb = TauTable::new(b, n_hi, sieve)?;
    let mut sum = 0.0;
    let mut count = 0u64;
    for m in lo..=hi {
        let num = m as i128 * n_mod as i128 - h as i128;
        if num <= 0 || num % m_mod as i128 != 0 {
            continue;
        }
        let n = (num / m_mod as i128) as usize;
        sum += ta.get(m as usize) * tb.get(n);
        count += 1;
    }
    let value = sum / (2.0 * delta * u);
    Ok(MomentReport::new(Method::Empirical, Complex64::new(value, 0.0), 0.0)
        .with("A", fmt_shifts(a.shifts()))
        .with("B", fmt_shifts(b.shifts()))
        .with("M", m_mod)
        .with("N", n_mod)
        .with("h", h)
        .with("u", u)
        .with("delta", delta)
        .with("terms", count))
}
