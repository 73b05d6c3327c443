//! The verification suites behind each mode.

use divcorr_core::local::{IdentityInstance, IdentityReport, LocalConfig};
use divcorr_core::multiplicity::{star_system_multiplicity, swap_multiplicity_bruteforce, weight_w, SwapInstance};
use divcorr_core::numeric::arith::gcd;
use divcorr_core::numeric::{correlation_sum, direct_integral, recipe_predict, tau_global, MomentReport, SieveTable, TestFunction};
use divcorr_core::NumericShiftSet;
use rayon::prelude::*;

use crate::config::{ConfigError, Mode, RunConfig};
use crate::instances::{seed_instances_of, IdentityKind};
use crate::report::CheckRecord;

/// Checks plus any numeric values worth a CSV row.
#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<CheckRecord>,
    pub moments: Vec<MomentReport>,
}

/// Run the suite selected by `cfg.mode`.
pub fn run_suite(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    cfg.validate()?;
    match cfg.mode {
        Mode::VerifyLocal => Ok(Outcome { checks: verify_local(cfg), moments: vec![] }),
        Mode::Tau => tau_suite(cfg),
        Mode::Correlate | Mode::Recipe | Mode::Compare => global_suite(cfg),
        Mode::Multiplicity => Ok(Outcome { checks: multiplicity_suite(cfg), moments: vec![] }),
    }
}

fn identity_record(kind: &str, inst: &IdentityInstance, res: Result<IdentityReport, divcorr_core::Error>) -> CheckRecord {
    match res {
        Ok(r) => {
            let mut c = CheckRecord::new(r.identity.clone(), r.instance.clone(), r.passed)
                .with("ell", r.ell)
                .with("denom", r.meta.denom)
                .with("order_x", r.meta.order_x)
                .with("bound", r.meta.bound);
            if let Some(m) = &r.mismatch {
                c = c.with("mismatch_exponent", m.exponent);
                c.message = Some(format!("first difference at Y^{}: {} vs {}", m.exponent, m.left, m.right));
            }
            c
        }
        Err(e) => CheckRecord::failed(kind, inst.describe(), e),
    }
}

/// Exact identity checks on seeded instances, plus the doubled-bound witnesses.
pub fn verify_local(cfg: &RunConfig) -> Vec<CheckRecord> {
    let mut jobs: Vec<(IdentityKind, IdentityInstance, LocalConfig, bool)> = Vec::new();
    for &kind in &cfg.identities {
        let count = cfg.count.unwrap_or(kind.default_count());
        let order = if kind == IdentityKind::Theorem4 { cfg.order_theorem4 } else { cfg.order };
        let lc = LocalConfig::with_order(order);
        let insts = seed_instances_of(kind, cfg.seed, count, cfg.profile);
        for (i, inst) in insts.into_iter().enumerate() {
            if i < cfg.witness {
                jobs.push((kind, inst.clone(), lc, true));
            }
            jobs.push((kind, inst, lc, false));
        }
    }
    // witnesses sort after the plain checks of the same kind
    jobs.sort_by_key(|j| (j.0, j.3));
    jobs.par_iter()
        .map(|(kind, inst, lc, witness)| {
            let res = if *witness { inst.soundness_witness(lc) } else { inst.check(lc) };
            let name = if *witness { format!("{}-witness", kind.name()) } else { kind.name().to_string() };
            identity_record(&name, inst, res)
        })
        .collect()
}

fn shift_set(v: &[f64]) -> Result<NumericShiftSet, ConfigError> {
    NumericShiftSet::new_coincident(v.to_vec()).map_err(|e| ConfigError(e.to_string()))
}

fn tau_suite(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let a = shift_set(&cfg.a)?;
    let top = cfg.n.iter().copied().max().unwrap_or(1);
    let pairs: Vec<(u64, u64)> = cfg
        .n
        .iter()
        .flat_map(|&m| cfg.n.iter().map(move |&n| (m, n)))
        .filter(|&(m, n)| m < n && gcd(m, n) == 1 && m.saturating_mul(n) <= 10_000_000)
        .collect();
    let limit = pairs.iter().map(|&(m, n)| m * n).max().unwrap_or(1).max(top);
    let sieve = SieveTable::new(limit).map_err(|e| ConfigError(e.to_string()))?;
    let mut checks = Vec::new();
    for &n in &cfg.n {
        checks.push(match tau_global(&a, n, &sieve) {
            Ok(v) => CheckRecord::new("tau", format!("n={n}"), v.is_finite()).with_f64("value", v),
            Err(e) => CheckRecord::failed("tau", format!("n={n}"), e),
        });
    }
    for (m, n) in pairs {
        let rec = (|| -> Result<CheckRecord, divcorr_core::Error> {
            let (x, y, xy) = (tau_global(&a, m, &sieve)?, tau_global(&a, n, &sieve)?, tau_global(&a, m * n, &sieve)?);
            let gap = (xy - x * y).abs();
            Ok(CheckRecord::new("tau-multiplicative", format!("m={m} n={n}"), gap <= 1e-12 * xy.abs().max(1.0)).with_f64("gap", gap))
        })();
        checks.push(rec.unwrap_or_else(|e| CheckRecord::failed("tau-multiplicative", format!("m={m} n={n}"), e)));
    }
    Ok(Outcome { checks, moments: vec![] })
}

fn relative(x: f64, reference: f64) -> f64 {
    (x - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

fn global_suite(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let (a, b) = (shift_set(&cfg.a)?, shift_set(&cfg.b)?);
    let sieve = SieveTable::new(cfg.x).map_err(|e| ConfigError(e.to_string()))?;
    let tf = TestFunction::bump();
    let inst = format!("T={} X={}", cfg.t, cfg.x);
    let want_corr = cfg.mode != Mode::Recipe;
    let want_direct = cfg.mode == Mode::Compare || (cfg.mode == Mode::Correlate && cfg.direct);
    let want_recipe = cfg.mode != Mode::Correlate;

    let mut out = Outcome::default();
    let run = |name: &str, r: Result<MomentReport, divcorr_core::Error>, out: &mut Outcome| -> Option<MomentReport> {
        match r {
            Ok(m) => {
                out.checks.push(
                    CheckRecord::new(name, inst.clone(), m.is_well_formed())
                        .with_f64("value_re", m.value.re)
                        .with_f64("value_im", m.value.im)
                        .with_f64("error", m.error),
                );
                out.moments.push(m.clone());
                Some(m)
            }
            Err(e) => {
                out.checks.push(CheckRecord::failed(name, inst.clone(), e));
                None
            }
        }
    };
    let corr = want_corr.then(|| correlation_sum(&a, &b, cfg.t, cfg.x, &tf, cfg.eps, &sieve));
    let corr = corr.and_then(|r| run("correlation-sum", r, &mut out));
    let direct = want_direct.then(|| direct_integral(&a, &b, cfg.t, cfg.x, &tf, &sieve));
    let direct = direct.and_then(|r| run("direct-integral", r, &mut out));
    let recipe = want_recipe.then(|| recipe_predict(&a, &b, cfg.t, cfg.x, &tf));
    let recipe = recipe.and_then(|r| run("recipe", r, &mut out));

    if let (Some(c), Some(d)) = (&corr, &direct) {
        let rel = (d.value - c.value).norm() / c.value.norm().max(f64::MIN_POSITIVE);
        out.checks.push(
            CheckRecord::new("identity", inst.clone(), rel <= cfg.identity_tol)
                .with_f64("relative_delta", rel)
                .with_f64("tolerance", cfg.identity_tol),
        );
    }
    if cfg.mode == Mode::Compare {
        if let (Some(c), Some(r)) = (&corr, &recipe) {
            let rel = relative(r.value.re, c.value.re);
            out.checks.push(
                CheckRecord::new("recipe-vs-sum", inst.clone(), rel <= cfg.recipe_tol)
                    .with_f64("relative_delta", rel)
                    .with_f64("tolerance", cfg.recipe_tol),
            );
        }
    }
    Ok(out)
}

/// Swap counts against the weight for every `(k, l)` with `k <= kmax`, then
/// the star-system grid.
pub fn multiplicity_suite(cfg: &RunConfig) -> Vec<CheckRecord> {
    let mut checks = Vec::new();
    for k in 1..=cfg.kmax {
        for l in 1..=k {
            let inst = format!("k={k} l={l}");
            // leading representatives, then the trailing ones
            let placements = [
                ("count_leading", SwapInstance::leading(k, l)),
                ("count_trailing", SwapInstance::new(k, l, (k - l..k).collect(), (k - l..k).rev().collect())),
            ];
            let w = weight_w(k, l).expect("arity checked");
            let mut rec = CheckRecord::new("swap-multiplicity", inst.clone(), true).with("formula", w as u64);
            for (key, p) in placements {
                match p.and_then(|p| swap_multiplicity_bruteforce(&p)) {
                    Ok(c) => {
                        rec.passed &= c == w;
                        rec = rec.with(key, c as u64);
                    }
                    Err(e) => {
                        rec = CheckRecord::failed("swap-multiplicity", inst.clone(), e);
                        break;
                    }
                }
            }
            checks.push(rec);
        }
    }
    for k in 1..=cfg.star_kmax {
        for l in 1..=k {
            checks.push(star_check(cfg, k, l));
        }
    }
    checks
}

fn star_check(cfg: &RunConfig, k: usize, l: usize) -> CheckRecord {
    let inst = format!("k={k} l={l} grid={}x{}", cfg.star_grid.len(), cfg.star_grid.len());
    let w = weight_w(k, l).expect("arity checked");
    let pairs: Vec<(u64, u64)> = cfg
        .star_grid
        .iter()
        .flat_map(|&m| cfg.star_grid.iter().map(move |&n| (m, n)))
        .collect();
    let per_pair: Result<Vec<(u64, u128, u128)>, _> = pairs
        .par_iter()
        .map(|&(m, n)| {
            let counts = star_system_multiplicity(m, n, k, l)?;
            let lo = counts.values().copied().min().unwrap_or(0);
            let hi = counts.values().copied().max().unwrap_or(0);
            Ok::<_, divcorr_core::Error>((counts.len() as u64, lo, hi))
        })
        .collect();
    match per_pair {
        Ok(v) => {
            let solutions: u64 = v.iter().map(|t| t.0).sum();
            let lo = v.iter().map(|t| t.1).min().unwrap_or(0);
            let hi = v.iter().map(|t| t.2).max().unwrap_or(0);
            CheckRecord::new("star-multiplicity", inst, lo == hi && hi == w)
                .with("solutions", solutions)
                .with("min_count", lo as u64)
                .with("max_count", hi as u64)
                .with("formula", w as u64)
        }
        Err(e) => CheckRecord::failed("star-multiplicity", inst, e),
    }
}
