//! Main-term prediction from the swap recipe, origin residue only.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use super::euler::{euler_b_with, EulerValue, DEFAULT_PRIME_LIMIT};
use super::testfn::TestFunction;
use super::{fmt_shifts, Method, MomentReport};
use crate::error::{Error, Result};
use crate::shifts::{swap_transform_numeric, NumericShiftSet, SwapSelection};

/// One admitted swap class.
#[derive(Clone, Debug, PartialEq)]
pub struct RecipeTerm {
    pub selection: SwapSelection,
    /// sum of the swapped shifts from both sides
    pub sigma: f64,
    pub euler: EulerValue,
    /// `int psi(t) (t T / 2 pi)^{-sigma} dt`
    pub weight: f64,
}

impl RecipeTerm {
    pub fn value(&self) -> f64 {
        self.euler.value * self.weight
    }
}

/// Largest swap size admitted for the given `T` and `X`: all `u` with `X >= T^u`.
pub fn admitted_swap_size(t: f64, x: u64, ka: usize, kb: usize) -> usize {
    let mut u = 0;
    while u < ka.min(kb) && x as f64 >= t.powi(u as i32 + 1) {
        u += 1;
    }
    u
}

fn swap_terms(a: &NumericShiftSet, b: &NumericShiftSet, max_swap: usize, prime_limit: u64) -> Result<Vec<(SwapSelection, f64, EulerValue)>> {
    // all transforms first, so collisions surface before any pole
    let mut swapped = Vec::new();
    for u in 0..=max_swap {
        for sel in SwapSelection::all_of_size(a.len(), b.len(), u) {
            let pair = swap_transform_numeric(a, b, &sel)?;
            swapped.push((sel, pair));
        }
    }
    let mut out = Vec::with_capacity(swapped.len());
    for (sel, (a2, b2)) in swapped {
        let sigma: f64 = sel.u_indices.iter().map(|&i| a.shifts()[i]).sum::<f64>()
            + sel.v_indices.iter().map(|&j| b.shifts()[j]).sum::<f64>();
        let e = euler_b_with(&a2, &b2, 1.0, prime_limit)?;
        out.push((sel, sigma, e));
    }
    Ok(out)
}

/// The recipe integrand `sum B(A', B', 1) q^{-sigma}` at `q = t T / 2 pi`, over swaps
/// of size at most `max_swap`.
pub fn recipe_integrand(a: &NumericShiftSet, b: &NumericShiftSet, q: f64, max_swap: usize) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    Ok(swap_terms(a, b, max_swap, DEFAULT_PRIME_LIMIT)?
        .iter()
        .map(|(_, sigma, e)| e.value * q.powf(-sigma))
        .sum())
}

/// Admitted swap terms for `(T, X)` with their weights.
pub fn recipe_terms(a: &NumericShiftSet, b: &NumericShiftSet, t: f64, x: u64, tf: &TestFunction, prime_limit: u64) -> Result<Vec<RecipeTerm>> {
    if !(t > 1.0) {
        return Err(Error::InvalidArgument("T must exceed 1".into()));
    }
    let ell = admitted_swap_size(t, x, a.len(), b.len());
    let scale = t / (2.0 * PI);
    Ok(swap_terms(a, b, ell, prime_limit)?
        .into_iter()
        .map(|(selection, sigma, euler)| {
            let weight = tf.integrate_against(|tau| Complex64::new((tau * scale).powf(-sigma), 0.0)).re;
            RecipeTerm { selection, sigma, euler, weight }
        })
        .collect())
}

/// Sum of the admitted swap terms.
pub fn recipe_predict(a: &NumericShiftSet, b: &NumericShiftSet, t: f64, x: u64, tf: &TestFunction) -> Result<MomentReport> {
    recipe_predict_with(a, b, t, x, tf, DEFAULT_PRIME_LIMIT)
}

/// [`recipe_predict`] with an explicit prime limit for the Euler products.
pub fn recipe_predict_with(a: &NumericShiftSet, b: &NumericShiftSet, t: f64, x: u64, tf: &TestFunction, prime_limit: u64) -> Result<MomentReport> {
    let terms = recipe_terms(a, b, t, x, tf, prime_limit)?;
    let value: f64 = terms.iter().map(RecipeTerm::value).sum();
    let error: f64 = terms
        .iter()
        .map(|r| r.euler.error * r.weight.abs() + 1e-13 * r.value().abs())
        .sum();
    let ell = admitted_swap_size(t, x, a.len(), b.len());
    Ok(MomentReport::new(Method::Recipe, Complex64::new(value, 0.0), error)
        .with("T", t)
        .with("X", x)
        .with("A", fmt_shifts(a.shifts()))
        .with("B", fmt_shifts(b.shifts()))
        .with("max_swap", ell)
        .with("terms", terms.len())
        .with("prime_limit", prime_limit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::zeta::zeta_num;
    use alloc::vec;

    fn ns(v: &[f64]) -> NumericShiftSet {
        NumericShiftSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn k1_two_terms() {
        let tf = TestFunction::bump();
        let (al, be) = (0.07, 0.11);
        let t = 300.0;
        let r = recipe_predict(&ns(&[al]), &ns(&[be]), t, 400, &tf).unwrap();
        let expect = tf
            .integrate_against(|tau| {
                let q = tau * t / (2.0 * PI);
                Complex64::new(zeta_num(1.0 + al + be).unwrap() + q.powf(-al - be) * zeta_num(1.0 - al - be).unwrap(), 0.0)
            })
            .re;
        assert!((r.value.re - expect).abs() < 1e-11 * expect.abs());
        assert_eq!(r.param("max_swap"), Some("1"));
    }

    #[test]
    fn threshold_toggles_at_t() {
        let tf = TestFunction::bump();
        let (a, b) = (ns(&[0.07]), ns(&[0.11]));
        let below = recipe_terms(&a, &b, 300.0, 299, &tf, 2000).unwrap();
        let at = recipe_terms(&a, &b, 300.0, 300, &tf, 2000).unwrap();
        assert_eq!(below.len(), 1);
        assert_eq!(at.len(), 2);
        assert_eq!(admitted_swap_size(10.0, 99, 2, 2), 1);
        assert_eq!(admitted_swap_size(10.0, 100, 2, 2), 2);
        assert_eq!(admitted_swap_size(10.0, 100_000, 2, 3), 2);
    }

    #[test]
    fn collision_is_reported() {
        let tf = TestFunction::bump();
        // swapping the second pair puts -0.1 next to an existing -0.1
        let r = recipe_predict(&ns(&[-0.1, 0.2]), &ns(&[0.1, 0.05]), 50.0, 3000, &tf);
        assert!(matches!(r, Err(Error::SwapCollision(_))), "{r:?}");
    }

    #[test]
    fn swap_sum_symmetries() {
        // With every swap size present, (-B, -A) reproduces the integrand up to
        // q^{sum A + sum B}, and exchanging A with B changes nothing.
        let (a, b) = (vec![0.06, -0.03], vec![0.09, 0.02]);
        let neg = |v: &[f64]| ns(&v.iter().map(|x| -x).collect::<Vec<_>>());
        let tot: f64 = a.iter().chain(&b).sum();
        for q in [3.0, 40.0, 700.0] {
            let i_ab = recipe_integrand(&ns(&a), &ns(&b), q, 2).unwrap();
            let i_ba = recipe_integrand(&ns(&b), &ns(&a), q, 2).unwrap();
            let i_neg = recipe_integrand(&neg(&b), &neg(&a), q, 2).unwrap();
            assert!((i_ab - i_ba).abs() < 1e-10 * i_ab.abs());
            assert!((i_neg - q.powf(tot) * i_ab).abs() < 1e-9 * i_neg.abs(), "{q} {i_neg} {i_ab}");
        }
    }
}
