//! The Riemann zeta function on the positive real axis.

use num_traits::Float;

use crate::error::{Error, Result};

/// Default number of terms of the accelerated alternating series.
pub const ETA_TERMS: usize = 64;

const STIELTJES: [f64; 14] = [
    0.577_215_664_901_532_9,
    -0.072_815_845_483_676_72,
    -0.009_690_363_192_872_318,
    0.002_053_834_420_303_346,
    0.002_325_370_065_467_3,
    0.000_793_323_817_301_062_7,
    -0.000_238_769_345_430_199_6,
    -0.000_527_289_567_057_751,
    -0.000_352_123_353_803_039_5,
    -0.000_034_394_774_418_088_05,
    0.000_205_332_814_909_064_8,
    0.000_270_184_439_543_903_5,
    0.000_167_272_912_105_140_2,
    -0.000_027_463_806_603_760_16,
];

/// Dirichlet eta `sum (-1)^{n-1} n^{-s}` by Borwein's acceleration with `n` terms.
pub fn eta_borwein(s: f64, n: usize) -> f64 {
    // d_k = sum_{i<=k} t_i, t_i = n (n+i-1)! 4^i / ((n-i)! (2i)!)
    let nf = n as f64;
    let mut d = alloc::vec::Vec::with_capacity(n + 1);
    let mut t = 1.0;
    let mut acc = 1.0;
    d.push(acc);
    for i in 1..=n {
        let fi = i as f64;
        t *= 4.0 * (nf + fi - 1.0) * (nf - fi + 1.0) / ((2.0 * fi) * (2.0 * fi - 1.0));
        acc += t;
        d.push(acc);
    }
    let dn = d[n];
    let mut sum = 0.0;
    for k in (0..n).rev() {
        let term = (d[k] - dn) / ((k + 1) as f64).powf(s);
        sum += if k % 2 == 0 { term } else { -term };
    }
    -sum / dn
}

/// `zeta(s)` for real `s > 0`, `|s - 1| >= 1e-6`, absolute accuracy about `1e-12`.
pub fn zeta_num(s: f64) -> Result<f64> {
    zeta_with_terms(s, ETA_TERMS)
}

/// Same as [`zeta_num`] with an explicit acceleration order.
pub fn zeta_with_terms(s: f64, n: usize) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("zeta_num needs s > 0, got {s}")));
    }
    let h = s - 1.0;
    if h.abs() < 1e-6 {
        return Err(Error::PoleProximity(s));
    }
    if h.abs() < 0.1 {
        // Laurent expansion about s = 1
        let mut sum = 0.0;
        let mut pow = 1.0;
        let mut fact = 1.0;
        for (k, g) in STIELTJES.iter().enumerate() {
            if k > 0 {
                pow *= -h;
                fact *= k as f64;
            }
            sum += g * pow / fact;
        }
        return Ok(1.0 / h + sum);
    }
    if s > 60.0 {
        return Ok(1.0 + 2f64.powf(-s) + 3f64.powf(-s));
    }
    Ok(eta_borwein(s, n) / (1.0 - 2f64.powf(1.0 - s)))
}

/// `zeta(s) - 1` without cancellation for large `s`.
pub fn zeta_minus_one(s: f64) -> Result<f64> {
    if s > 20.0 {
        let mut sum = 0.0;
        for n in (2..=20u32).rev() {
            sum += (n as f64).powf(-s);
        }
        return Ok(sum);
    }
    Ok(zeta_num(s)? - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn known_values() {
        assert!((zeta_num(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-13);
        assert!((zeta_num(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-13);
        assert!((zeta_num(0.5).unwrap() + 1.460_354_508_809_586_8).abs() < 1e-12);
        assert!((zeta_num(1.05).unwrap() - 20.580_844_302_036_985).abs() < 1e-11);
        assert!((zeta_num(0.95).unwrap() + 19.426_437_196_930_78).abs() < 1e-11);
        assert!((zeta_num(1.0 + 1e-5).unwrap() - 100_000.577_216_393_06).abs() < 1e-5);
    }

    #[test]
    fn two_orders_agree() {
        for s in [0.2, 0.5, 0.8, 1.2, 1.5, 3.0, 7.5] {
            let a = zeta_with_terms(s, 40).unwrap();
            let b = zeta_with_terms(s, 80).unwrap();
            assert!((a - b).abs() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn eta_identity() {
        for s in [0.3, 0.7, 1.5, 2.5] {
            let z = zeta_num(s).unwrap();
            assert!((z * (1.0 - 2f64.powf(1.0 - s)) - eta_borwein(s, ETA_TERMS)).abs() < 1e-13);
        }
    }

    #[test]
    fn domain() {
        assert!(matches!(zeta_num(1.0), Err(Error::PoleProximity(_))));
        assert!(matches!(zeta_num(1.0 + 1e-7), Err(Error::PoleProximity(_))));
        assert!(zeta_num(0.0).is_err());
        assert!(zeta_num(-1.0).is_err());
    }

    #[test]
    fn minus_one_small() {
        let v = zeta_minus_one(30.0).unwrap();
        let head = 2f64.powi(-30) + 3f64.powi(-30);
        assert!((v - head - 8.684_400_483_857_022e-19).abs() < 1e-25);
    }
}
