//! Exhaustive counts behind the weight `w_l = l!^2 l^{2(k-l)}`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numeric::arith::{divisors, gcd};

const MAX_SWAP_K: usize = 7;
const MAX_STAR_K: usize = 4;
const MAX_STAR_MN: u64 = 10_000;

/// A fixed swap: `ell` representatives on each side of a `k`-element pair of sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapInstance {
    pub k: usize,
    pub ell: usize,
    pub u_reps: Vec<usize>,
    pub v_reps: Vec<usize>,
}

impl SwapInstance {
    pub fn new(k: usize, ell: usize, u_reps: Vec<usize>, v_reps: Vec<usize>) -> Result<Self> {
        check_arity(k, ell)?;
        for reps in [&u_reps, &v_reps] {
            if reps.len() != ell {
                return Err(Error::InvalidSelection(format!("need {ell} representatives, got {}", reps.len())));
            }
            let mut seen = vec![false; k];
            for &r in reps {
                if r >= k || seen[r] {
                    return Err(Error::InvalidSelection(format!("bad representative list {reps:?} for k = {k}")));
                }
                seen[r] = true;
            }
        }
        Ok(SwapInstance { k, ell, u_reps, v_reps })
    }

    /// Representatives at the first `ell` positions on both sides.
    pub fn leading(k: usize, ell: usize) -> Result<Self> {
        Self::new(k, ell, (0..ell).collect(), (0..ell).collect())
    }
}

fn check_arity(k: usize, ell: usize) -> Result<()> {
    if ell == 0 || ell > k {
        return Err(Error::InvalidArity(format!("need 1 <= l <= k, got k = {k}, l = {ell}")));
    }
    Ok(())
}

/// `l!^2 l^{2(k-l)}`.
pub fn weight_w(k: usize, ell: usize) -> Result<u128> {
    check_arity(k, ell)?;
    let fact: u128 = (1..=ell as u128).product();
    Ok(fact * fact * (ell as u128).pow(2 * (k - ell) as u32))
}

/// Labeled block maps `{0..k} -> {0..ell}` putting exactly one representative in each block.
pub fn rep_groupings(k: usize, ell: usize, reps: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut g = vec![0usize; k];
    let total = (ell as u64).pow(k as u32);
    for code in 0..total {
        let mut c = code;
        for slot in g.iter_mut() {
            *slot = (c % ell as u64) as usize;
            c /= ell as u64;
        }
        let mut hit = vec![0u8; ell];
        for &r in reps {
            hit[g[r]] += 1;
        }
        if hit.iter().all(|&h| h == 1) {
            out.push(g.clone());
        }
    }
    out
}

/// Number of one-sided groupings compatible with the representatives.
pub fn one_sided_count(k: usize, ell: usize, reps: &[usize]) -> usize {
    rep_groupings(k, ell, reps).len()
}

/// Counts pairs of labeled decompositions of `A` and `B` that realize the swap.
pub fn swap_multiplicity_bruteforce(inst: &SwapInstance) -> Result<u128> {
    if inst.k > MAX_SWAP_K {
        return Err(Error::SearchSpaceTooLarge(format!("k = {} exceeds {MAX_SWAP_K}", inst.k)));
    }
    let ga = rep_groupings(inst.k, inst.ell, &inst.u_reps);
    let gb = rep_groupings(inst.k, inst.ell, &inst.v_reps);
    let mut count: u128 = 0;
    for _ in &ga {
        for _ in &gb {
            count += 1;
        }
    }
    Ok(count)
}

/// Ordered factorizations `(mu_1, .., mu_k)` of `m`.
pub fn ordered_factorizations(m: u64, k: usize) -> Vec<Vec<u64>> {
    if k == 0 {
        return if m == 1 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for d in divisors(m) {
        for mut rest in ordered_factorizations(m / d, k - 1) {
            rest.insert(0, d);
            out.push(rest);
        }
    }
    out
}

/// A factorization pair `m = prod mu_i`, `n = prod nu_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct StarSolution {
    pub mu: Vec<u64>,
    pub nu: Vec<u64>,
}

/// One reduced equation `N m - M n = h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarEquation {
    pub m: i128,
    pub n: i128,
    pub big_m: i128,
    pub big_n: i128,
    pub h: i128,
}

fn block_products(vals: &[u64], g: &[usize], ell: usize) -> Vec<i128> {
    let mut out = vec![1i128; ell];
    for (i, &v) in vals.iter().enumerate() {
        out[g[i]] *= v as i128;
    }
    out
}

fn gcd_i(a: i128, b: i128) -> i128 {
    gcd(a.unsigned_abs() as u64, b.unsigned_abs() as u64) as i128
}

/// System induced by regrouping the canonical base system of `sol`.
///
/// Representatives sit at positions `0..ell`. The base puts every free factor
/// in the block of representative 0 and uses `M = N = 1`, `h = m - n`. Equation
/// `i` follows representative `i` on both sides; `None` if any check fails.
pub fn induced_system(sol: &StarSolution, ell: usize, ga: &[usize], gb: &[usize]) -> Option<Vec<StarEquation>> {
    let k = sol.mu.len();
    let base_g: Vec<usize> = (0..k).map(|i| if i < ell { i } else { 0 }).collect();
    let m0 = block_products(&sol.mu, &base_g, ell);
    let n0 = block_products(&sol.nu, &base_g, ell);
    let m1 = block_products(&sol.mu, ga, ell);
    let n1 = block_products(&sol.nu, gb, ell);
    let mut eqs = Vec::with_capacity(ell);
    for i in 0..ell {
        let (mu, nu) = (sol.mu[i] as i128, sol.nu[i] as i128);
        let (mt, nt) = (m1[ga[i]], n1[gb[i]]);
        let (mu_star, nu_star) = (mt / mu, nt / nu);
        let (mu_hat, nu_hat) = (m0[i] / mu, n0[i] / nu);
        let h0 = m0[i] - n0[i];
        let (mut big_m, mut big_n, mut h) = (mu_star * nu_hat, mu_hat * nu_star, h0 * mu_star * nu_star);
        let g = gcd_i(big_m, big_n);
        if h % g != 0 {
            return None;
        }
        big_m /= g;
        big_n /= g;
        h /= g;
        if big_n * mt - big_m * nt != h || gcd_i(big_m, big_n) != 1 {
            return None;
        }
        eqs.push(StarEquation { m: mt, n: nt, big_m, big_n, h });
    }
    let pm: i128 = eqs.iter().map(|e| e.big_m).product();
    let pn: i128 = eqs.iter().map(|e| e.big_n).product();
    let mm: i128 = eqs.iter().map(|e| e.m).product();
    let nn: i128 = eqs.iter().map(|e| e.n).product();
    (pm == pn && mm == sol.mu.iter().map(|&x| x as i128).product::<i128>() && nn == sol.nu.iter().map(|&x| x as i128).product::<i128>())
        .then_some(eqs)
}

/// For every factorization pair of `(m, n)`, the number of labeled regroupings
/// whose induced system passes every check.
pub fn star_system_multiplicity(m: u64, n: u64, k: usize, ell: usize) -> Result<BTreeMap<StarSolution, u128>> {
    check_arity(k, ell)?;
    if k > MAX_STAR_K || m == 0 || n == 0 || m > MAX_STAR_MN || n > MAX_STAR_MN {
        return Err(Error::SearchSpaceTooLarge(format!(
            "need k <= {MAX_STAR_K} and 1 <= m, n <= {MAX_STAR_MN}, got k = {k}, m = {m}, n = {n}"
        )));
    }
    let reps: Vec<usize> = (0..ell).collect();
    let groupings = rep_groupings(k, ell, &reps);
    let fm = ordered_factorizations(m, k);
    let fn_ = ordered_factorizations(n, k);
    let mut out = BTreeMap::new();
    for mu in &fm {
        for nu in &fn_ {
            let sol = StarSolution { mu: mu.clone(), nu: nu.clone() };
            let mut count = 0u128;
            for ga in &groupings {
                for gb in &groupings {
                    if induced_system(&sol, ell, ga, gb).is_some() {
                        count += 1;
                    }
                }
            }
            out.insert(sol, count);
        }
    }
    Ok(out)
}
