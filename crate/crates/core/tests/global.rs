use divcorr_core::numeric::delta::{delta_main_term, empirical_correlation};
use divcorr_core::numeric::*;
use divcorr_core::NumericShiftSet;

fn ns(v: &[f64]) -> NumericShiftSet {
    NumericShiftSet::new(v.to_vec()).unwrap()
}

#[test]
fn integral_equals_sum_within_reported_errors() {
    let sieve = SieveTable::new(5_000).unwrap();
    let tf = TestFunction::bump();
    let cases: [(&[f64], &[f64], f64, u64); 3] = [
        (&[0.1], &[-0.2], 60.0, 700),
        (&[0.05, -0.15], &[0.12, 0.0], 120.0, 1500),
        (&[0.2, 0.1, -0.1], &[0.0, 0.3, -0.25], 40.0, 300),
    ];
    for (a, b, t, x) in cases {
        let (a, b) = (ns(a), ns(b));
        let d = direct_integral(&a, &b, t, x, &tf, &sieve).unwrap();
        let c = correlation_sum(&a, &b, t, x, &tf, 1e-10, &sieve).unwrap();
        assert!(d.is_well_formed() && c.is_well_formed());
        let gap = (d.value - c.value).norm();
        assert!(gap <= d.error + c.error, "T={t} X={x}: gap {gap:e} vs {:e} + {:e}", d.error, c.error);
    }
}

#[test]
fn band_tail_bound_is_sound() {
    let sieve = SieveTable::new(20_000).unwrap();
    let tf = TestFunction::bump();
    let (a, b) = (ns(&[0.08, -0.03]), ns(&[0.11]));
    for (t, x) in [(300.0, 20_000u64), (1500.0, 8_000)] {
        let mut prev = correlation_sum(&a, &b, t, x, &tf, 1e-4, &sieve).unwrap();
        for eps in [1e-6, 1e-8, 1e-10, 1e-12] {
            let next = correlation_sum(&a, &b, t, x, &tf, eps, &sieve).unwrap();
            let moved = (next.value - prev.value).norm();
            assert!(moved <= prev.error, "eps {eps:e}: moved {moved:e}, bound {:e}", prev.error);
            prev = next;
        }
    }
}

#[test]
fn delta_tracks_empirical_with_moduli() {
    let sieve = SieveTable::new(400_000).unwrap();
    let a = NumericShiftSet::new_coincident(vec![0.0, 0.0]).unwrap();
    let b = ns(&[0.1, -0.05]);
    for (m, n, h) in [(2u64, 3u64, 1i64), (1, 1, 30), (3, 1, -4)] {
        let d = delta_main_term(&a, &b, m, n, h, 1e5, 2000).unwrap();
        let e = empirical_correlation(&a, &b, m, n, h, 1e5, 0.05, &sieve).unwrap();
        let rel = (d.value.re / e.value.re - 1.0).abs();
        assert!(rel < 0.02, "M={m} N={n} h={h}: {} vs {}", d.value.re, e.value.re);
    }
}
