use divcorr_core::local::*;
use divcorr_core::multiplicity::{one_sided_count, swap_multiplicity_bruteforce, weight_w, SwapInstance};
use divcorr_core::numeric::{tau_global, SieveTable};
use divcorr_core::qseries::{QSeries, Ring};
use divcorr_core::rational::lcm_u64;
use divcorr_core::shifts::{common_denominator, enumerate_ordered_partitions, swap_transform, SwapSelection};
use divcorr_core::{NumericShiftSet, Rational, ShiftSet};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

fn series(ring: Ring, lo: i64) -> impl Strategy<Value = QSeries> {
    prop::collection::vec((lo..=ring.cutoff, -9i64..=9, 1i64..=4), 0..6).prop_map(move |ts| {
        let mut s = QSeries::zero(ring);
        for (e, n, d) in ts {
            s.add_assign(&QSeries::monomial(e, rat(n, d), ring).unwrap()).unwrap();
        }
        s
    })
}

/// Distinct shifts strictly inside (-1/2, 1/2) with denominators dividing 12.
fn shift_set(max_len: usize) -> impl Strategy<Value = ShiftSet> {
    subsequence((-5i64..=5).collect::<Vec<_>>(), 1..=max_len)
        .prop_shuffle()
        .prop_map(|v| ShiftSet::new(v.into_iter().map(|n| rat(n, 12)).collect(), "S").unwrap())
}

fn shift(den: i64) -> impl Strategy<Value = Rational> {
    (-(den - 1) / 2..=(den - 1) / 2).prop_map(move |n| rat(n, den))
}

fn exact_ring(sets: &[&ShiftSet], extra: &[&Rational], n: usize) -> Ring {
    let d = sets
        .iter()
        .flat_map(|s| s.shifts())
        .chain(extra.iter().copied())
        .fold(1u64, |acc, r| lcm_u64(acc, r.denom_u64().unwrap()));
    let reach = (4 * n as i64 + 4) * d as i64;
    Ring::with_floor(d as u32, reach, -reach)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in series(Ring::new(6, 18), 0), b in series(Ring::new(6, 18), 0), c in series(Ring::new(6, 18), 0)) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().sub(&b).unwrap(), a);
    }

    #[test]
    fn ring_axioms_with_negative_exponents(a in series(Ring::new(4, 12), -6), b in series(Ring::new(4, 12), -6), c in series(Ring::new(4, 12), -6)) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn multiplication_truncation_consistent(a in series(Ring::new(3, 40), 0), b in series(Ring::new(3, 40), 0), cut in 0i64..40) {
        let low = Ring::new(3, cut);
        let direct = a.recast(low).unwrap().mul(&b.recast(low).unwrap()).unwrap();
        let wide = a.mul(&b).unwrap().recast(low).unwrap();
        prop_assert_eq!(direct, wide);
    }

    #[test]
    fn inverse_is_inverse(a in series(Ring::new(2, 16), 1), c0 in 1i64..5, e0 in -3i64..4) {
        let ring = Ring::new(2, 16);
        let unit = QSeries::monomial(0, rat(c0, 3), ring).unwrap().add(&a).unwrap();
        prop_assert_eq!(unit.mul(&unit.inv().unwrap()).unwrap(), QSeries::one(ring));
        // with a shifted valuation the product is 1 up to cutoff - 2 |e0|
        let shifted = unit.shift(e0).unwrap();
        let prod = shifted.mul(&shifted.inv().unwrap()).unwrap();
        let bound = 16 - 2 * e0.abs();
        prop_assert!(prod.eq_upto(&QSeries::one(ring), bound).unwrap().is_none());
    }

    #[test]
    fn swap_is_an_involution(a in shift_set(4), b in shift_set(4), size in 0usize..=4, pick in any::<u64>()) {
        let size = size.min(a.len()).min(b.len());
        let sels = SwapSelection::all_of_size(a.len(), b.len(), size);
        let sel = &sels[(pick % sels.len() as u64) as usize];
        // colliding swaps are rejected by construction
        let Ok((a1, b1)) = swap_transform(&a, &b, sel) else {
            return Ok(());
        };
        // the swapped elements sit at the end of each transformed set
        let back = SwapSelection::new((a1.len() - size..a1.len()).collect(), (b1.len() - size..b1.len()).collect());
        let (a2, b2) = swap_transform(&a1, &b1, &back).unwrap();
        prop_assert_eq!(a2.key(), a.key());
        prop_assert_eq!(b2.key(), b.key());
    }

    #[test]
    fn common_denominator_is_least(a in shift_set(5), cand in 1u64..=60) {
        let d = common_denominator(&[&a]);
        prop_assert!(a.shifts().iter().all(|s| s.scaled_integer(d as i64).is_some()));
        let on_grid = a.shifts().iter().all(|s| s.scaled_integer(cand as i64).is_some());
        if on_grid {
            prop_assert_eq!(cand % d, 0);
        }
    }

    #[test]
    fn shift_adjust_multiplies_by_monomial(a in shift_set(3), alpha in shift(6), n in 0usize..6) {
        let moved = shift_adjust(&a, &alpha).unwrap();
        let ring = exact_ring(&[&a], &[&alpha], n);
        let lhs = local_tau_in(&moved, n, ring).unwrap();
        let e = (&alpha * &Rational::from_int(n as i64)).scaled_integer(ring.denom as i64).unwrap();
        let rhs = local_tau_in(&a, n, ring).unwrap().shift(e).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cauchy_split(a in shift_set(3), b in shift_set(3), n in 0usize..7) {
        prop_assume!(a.shifts().iter().all(|s| !b.contains(s)));
        let u = a.union(b.shifts()).unwrap();
        let ring = exact_ring(&[&a, &b], &[], n);
        let mut conv = QSeries::zero(ring);
        for i in 0..=n {
            let t = local_tau_in(&a, i, ring).unwrap().mul(&local_tau_in(&b, n - i, ring).unwrap()).unwrap();
            conv.add_assign(&t).unwrap();
        }
        prop_assert_eq!(local_tau_in(&u, n, ring).unwrap(), conv);
    }

    #[test]
    fn a_plus_matches_union_with_zero(a in shift_set(3), w in prop::sample::select(vec![0i64, 6])) {
        prop_assume!(!a.contains(&Rational::ZERO));
        let weight = rat(w, 12);
        let ring = exact_ring(&[&a], &[&weight], 8);
        let mut arr = LocalArray::weighted(&a, weight.clone(), ring).unwrap();
        arr.extend_to(8).unwrap();
        let plus = a_plus(&arr).unwrap();
        let with_zero = a.union(&[Rational::ZERO]).unwrap();
        let mut direct = LocalArray::weighted(&with_zero, weight, ring).unwrap();
        direct.extend_to(8).unwrap();
        prop_assert_eq!(&plus.values()[..8], &direct.values()[..8]);
    }

    #[test]
    fn ordered_partition_count(k in 1usize..=8, l in 1usize..=8) {
        prop_assume!(l <= k);
        let surj: i64 = (0..=l as i64)
            .map(|i| {
                let binom: i64 = (0..i).fold(1, |acc, j| acc * (l as i64 - j) / (j + 1));
                (-1i64).pow(i as u32) * binom * (l as i64 - i).pow(k as u32)
            })
            .sum();
        prop_assert_eq!(enumerate_ordered_partitions(k, l).unwrap().len() as i64, surj);
    }

    #[test]
    fn swap_count_independent_of_placement(k in 1usize..=6, l in 1usize..=6, seed_u in any::<u64>(), seed_v in any::<u64>()) {
        prop_assume!(l <= k);
        let pick = |seed: u64| {
            let mut idx: Vec<usize> = (0..k).collect();
            let mut s = seed;
            for i in (1..k).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                idx.swap(i, (s >> 33) as usize % (i + 1));
            }
            idx.truncate(l);
            idx
        };
        let inst = SwapInstance::new(k, l, pick(seed_u), pick(seed_v)).unwrap();
        let one = one_sided_count(k, l, &inst.u_reps) as u128;
        prop_assert_eq!(swap_multiplicity_bruteforce(&inst).unwrap(), weight_w(k, l).unwrap());
        prop_assert_eq!(one * one, weight_w(k, l).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lemma1_random(a in shift_set(2), b in shift_set(2), al in shift(12), be in shift(12)) {
        let block = Block::new(a, b, al, be);
        let inst = IdentityInstance::Lemma1 { block, max_mn: 3 };
        if let Ok(rep) = inst.check(&LocalConfig::with_order(5)) {
            prop_assert!(rep.passed, "{:?}", rep);
        }
    }

    #[test]
    fn lemma2_random(a1 in shift_set(2), a2 in shift_set(2), b1 in shift_set(2), b2 in shift_set(2)) {
        let inst = IdentityInstance::Lemma2 { a: vec![a1, a2], b: vec![b1, b2] };
        if let Ok(rep) = inst.check(&LocalConfig::with_order(5)) {
            prop_assert!(rep.passed, "{:?}", rep);
        }
    }

    #[test]
    fn theorem2_random(a in shift_set(2), b in shift_set(2), al in shift(12), be in shift(12)) {
        let blocks = [Block::new(a, b, al, be)];
        if let Ok(rep) = theorem2_check(&blocks, &LocalConfig::with_order(5)) {
            prop_assert!(rep.passed, "{:?}", rep);
        }
    }

    #[test]
    fn theorem4_random(a in shift_set(2), b in shift_set(2), al in shift(12), be in shift(12), ka in shift_set(1), kb in shift_set(1)) {
        let blocks = [Block::new(a, b, al, be)];
        if let Ok(rep) = theorem4_check(&blocks, &[(ka, kb)], &LocalConfig::with_order(4)) {
            prop_assert!(rep.passed, "{:?}", rep);
        }
    }

    #[test]
    fn tau_multiplicative(m in 1u64..3000, n in 1u64..3000, s in prop::collection::vec(-0.45f64..0.45, 1..4)) {
        prop_assume!(divcorr_core::numeric::arith::gcd(m, n) == 1);
        let sieve = SieveTable::new(9_000_000).unwrap();
        let a = NumericShiftSet::new_coincident(s).unwrap();
        let lhs = tau_global(&a, m * n, &sieve).unwrap();
        let rhs = tau_global(&a, m, &sieve).unwrap() * tau_global(&a, n, &sieve).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }
}
