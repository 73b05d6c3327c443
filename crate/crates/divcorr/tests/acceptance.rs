//! Acceptance suite. Each test prints one `PASS`/`FAIL` line and then asserts.
//! Run with `cargo test -p divcorr --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use divcorr::suites::{multiplicity_suite, verify_local};
use divcorr::{CheckRecord, IdentityKind, Mode, Profile, RunConfig};
use divcorr_core::numeric::{
    correlation_sum, delta_main_term, direct_integral, empirical_correlation, euler_b, recipe_predict, tau_global, zeta_num,
    SieveTable, TestFunction,
};
use divcorr_core::NumericShiftSet;

fn verdict(id: u32, title: &str, passed: bool, detail: String) {
    println!("criterion {id} {} {title}: {detail}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "criterion {id} ({title}) failed: {detail}");
}

fn ns(v: &[f64]) -> NumericShiftSet {
    NumericShiftSet::new_coincident(v.to_vec()).unwrap()
}

fn tf() -> &'static TestFunction {
    static TF: OnceLock<TestFunction> = OnceLock::new();
    TF.get_or_init(TestFunction::bump)
}

/// Every seeded identity check plus five witnesses per kind, computed once.
fn local_run() -> &'static (Vec<CheckRecord>, Duration) {
    static RUN: OnceLock<(Vec<CheckRecord>, Duration)> = OnceLock::new();
    RUN.get_or_init(|| {
        let mut cfg = RunConfig::new(Mode::VerifyLocal);
        cfg.profile = Profile::Medium;
        cfg.witness = 5;
        let t0 = Instant::now();
        let checks = verify_local(&cfg);
        (checks, t0.elapsed())
    })
}

fn tally(suite: &str) -> (usize, usize, Vec<String>) {
    let rows: Vec<&CheckRecord> = local_run().0.iter().filter(|c| c.suite == suite).collect();
    let bad = rows.iter().filter(|c| !c.passed).map(|c| format!("{} {:?}", c.instance, c.message)).collect();
    (rows.iter().filter(|c| c.passed).count(), rows.len(), bad)
}

fn exact(id: u32, title: &str, kind: IdentityKind, want: usize) {
    let (ok, total, bad) = tally(kind.name());
    verdict(id, title, ok == want && total == want, format!("{ok}/{total} exact passes, failures {bad:?}"));
}

#[test]
fn criterion_1_theorem2() {
    let (ok, total, _) = tally("theorem2");
    let secs = local_run().1.as_secs_f64();
    let pass = ok == 25 && total == 25 && secs <= 600.0;
    verdict(1, "theorem2 at X-order 12, medium profile", pass, format!("{ok}/{total} exact passes, whole local run {secs:.1}s"));
}

#[test]
fn criterion_2_theorem4() {
    exact(2, "theorem4 at X-order 10", IdentityKind::Theorem4, 15);
}

#[test]
fn criterion_3_lemmas() {
    let (l1, l2, l3) = (tally("lemma1"), tally("lemma2"), tally("lemma3"));
    let pass = (l1.0, l1.1, l2.0, l2.1, l3.0, l3.1) == (20, 20, 15, 15, 15, 15);
    verdict(
        3,
        "lemma1 for M,N in 0..=6, lemma2, lemma3",
        pass,
        format!("{}/{}, {}/{}, {}/{} exact passes", l1.0, l1.1, l2.0, l2.1, l3.0, l3.1),
    );
}

#[test]
fn criterion_4_truncation_soundness() {
    let mut parts = Vec::new();
    let mut pass = true;
    for kind in IdentityKind::ALL {
        let (ok, total, _) = tally(&format!("{}-witness", kind.name()));
        pass &= ok == 5 && total == 5;
        parts.push(format!("{} {ok}/{total}", kind.name()));
    }
    verdict(4, "doubled index bounds leave retained coefficients unchanged", pass, parts.join(", "));
}

#[test]
fn criterion_5_multiplicity() {
    let mut cfg = RunConfig::new(Mode::Multiplicity);
    cfg.kmax = 6;
    cfg.star_kmax = 3;
    assert!(cfg.star_grid.iter().all(|&v| v <= 200));
    let checks = multiplicity_suite(&cfg);
    let swaps = checks.iter().filter(|c| c.suite == "swap-multiplicity").collect::<Vec<_>>();
    let stars = checks.iter().filter(|c| c.suite == "star-multiplicity").collect::<Vec<_>>();
    let pass = swaps.len() == 21 && stars.len() == 6 && checks.iter().all(|c| c.passed);
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.table_row()).collect();
    verdict(
        5,
        "swap count l!^2 l^(2(k-l)) for k <= 6, star systems for k <= 3",
        pass,
        format!(
            "{} swap cases, {} star cases on a {}-value grid, failures {failed:?}",
            swaps.len(),
            stars.len(),
            cfg.star_grid.len()
        ),
    );
}

#[test]
fn criterion_6_integral_identity() {
    let (t, x) = (200.0f64, 2000u64);
    let l = t.ln();
    let sieve = SieveTable::new(x).unwrap();
    let cases: [(&[f64], &[f64]); 3] = [
        (&[1.0 / l], &[1.0 / l]),
        (&[1.0 / l], &[-1.0 / l]),
        (&[1.0 / l, -1.0 / l], &[-1.0 / l, 1.0 / l]),
    ];
    let mut worst = 0.0f64;
    for (a, b) in cases {
        let (a, b) = (ns(a), ns(b));
        let c = correlation_sum(&a, &b, t, x, tf(), 1e-12, &sieve).unwrap();
        let d = direct_integral(&a, &b, t, x, tf(), &sieve).unwrap();
        worst = worst.max((d.value - c.value).norm() / c.value.norm());
    }
    verdict(6, "direct integral vs correlation sum, T=200 X=2000", worst <= 1e-6, format!("worst relative gap {worst:.3e}"));
}

fn recipe_gap(a: &[f64], b: &[f64], t: f64, x: u64) -> f64 {
    let sieve = SieveTable::new(x).unwrap();
    let (a, b) = (ns(a), ns(b));
    let c = correlation_sum(&a, &b, t, x, tf(), 1e-10, &sieve).unwrap();
    let r = recipe_predict(&a, &b, t, x, tf()).unwrap();
    (r.value.re - c.value.re).abs() / c.value.re.abs()
}

#[test]
fn criterion_7_recipe() {
    let t1 = 5000f64;
    let g1 = recipe_gap(&[1.0 / t1.ln()], &[2.0 / t1.ln()], t1, t1.powf(1.5) as u64);
    let t2 = 2000f64;
    let l2 = t2.ln();
    let g2 = recipe_gap(&[1.0 / l2, 2.0 / l2], &[1.0 / l2, 2.0 / l2], t2, t2.powf(1.2) as u64);
    verdict(
        7,
        "recipe vs correlation sum",
        g1 <= 0.05 && g2 <= 0.10,
        format!("k=1 T=5000 X=T^1.5 gap {g1:.3e} (tol 5%), k=2 T=2000 X=T^1.2 gap {g2:.3e} (tol 10%)"),
    );
}

#[test]
fn criterion_8_delta_method() {
    let u = 1e6;
    let zero = ns(&[0.0, 0.0]);
    let sieve = SieveTable::new(1_100_000).unwrap();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for h in [1i64, 2, 6] {
        let d = delta_main_term(&zero, &zero, 1, 1, h, u, 10_000).unwrap();
        let e = empirical_correlation(&zero, &zero, 1, 1, h, u, 0.05, &sieve).unwrap();
        let gap = (d.value.re - e.value.re).abs() / e.value.re.abs();
        worst = worst.max(gap);
        parts.push(format!("h={h}: {:.4} vs {:.4}", d.value.re, e.value.re));
    }
    verdict(
        8,
        "delta main term vs window average, u=1e6, A=B={0,0}",
        worst <= 0.10,
        format!("{}, worst gap {worst:.3e}", parts.join("; ")),
    );
}

fn divisor_count(n: u64) -> u64 {
    (1..=n).take_while(|d| d * d <= n).filter(|d| n % d == 0).map(|d| if d * d == n { 1 } else { 2 }).sum()
}

#[test]
fn criterion_9_unit_oracles() {
    let z2 = (zeta_num(2.0).unwrap() - PI * PI / 6.0).abs();

    let mut b_gap = 0.0f64;
    for (a, b) in [(0.1, 0.25), (-0.2, 0.35), (0.3, 0.4), (0.45, 0.45), (0.0, 0.05)] {
        let v = euler_b(&ns(&[a]), &ns(&[b]), 1.0).unwrap();
        b_gap = b_gap.max((v - zeta_num(1.0 + a + b).unwrap()).abs());
    }
    // s + a + b = 2 pins the value without the zeta routine
    b_gap = b_gap.max((euler_b(&ns(&[0.3]), &ns(&[0.2]), 1.5).unwrap() - PI * PI / 6.0).abs());

    let sieve = SieveTable::new(10_000).unwrap();
    let zero = ns(&[0.0, 0.0]);
    let tau_bad: Vec<u64> = (1..=10_000u64)
        .filter(|&n| tau_global(&zero, n, &sieve).unwrap() != divisor_count(n) as f64)
        .collect();
    verdict(
        9,
        "zeta(2), singleton Euler product, tau_{0,0} = d",
        z2 <= 1e-10 && b_gap <= 1e-9 && tau_bad.is_empty(),
        format!("zeta(2) gap {z2:.2e}, singleton gap {b_gap:.2e}, tau mismatches {}", tau_bad.len()),
    );
}
