//! Smallest-prime-factor sieve.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default sieve limit.
pub const DEFAULT_X_MAX: u64 = 10_000_000;
/// Hard cap on the sieve limit (the table holds one `u32` per integer).
pub const HARD_CAP: u64 = 200_000_000;

/// `spf[n]` is the least prime factor of `n` for `2 <= n <= limit`.
#[derive(Clone, Debug)]
pub struct SieveTable {
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SieveTable {
    pub fn new(limit: u64) -> Result<Self> {
        if limit > HARD_CAP {
            return Err(Error::OutOfSieveRange { n: limit, limit: HARD_CAP });
        }
        let n = limit.max(1) as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > n {
                    break;
                }
                spf[m] = p;
            }
        }
        Ok(SieveTable { spf, primes })
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn check(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit() {
            Err(Error::OutOfSieveRange { n, limit: self.limit() })
        } else {
            Ok(())
        }
    }

    /// Least prime factor of `2 <= n <= limit`.
    pub fn spf(&self, n: u64) -> u32 {
        self.spf[n as usize]
    }

    /// Prime factorization as `(p, e)` pairs in increasing order.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        self.check(n)?;
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        Ok(out)
    }

    /// `(p, e, n / p^e)` for `n >= 2`, with `p` the least prime factor.
    pub fn split_smallest(&self, n: usize) -> (usize, u32, usize) {
        let p = self.spf[n] as usize;
        let mut m = n;
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        (p, e, m)
    }
}
