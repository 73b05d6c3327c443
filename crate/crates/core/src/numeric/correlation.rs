//! The banded correlation double sum and the direct `t`-integral.
//!
//! With `c = T / 2 pi` and `L_n = log n` the summand of the correlation sum is
//! `a_m b_n Phi(c (L_m - L_n))` where the phase `e^{-3 pi i x}` of `psi_hat` has been
//! split between `a_m` and `b_n`.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;

use num_complex::Complex64;
use num_traits::Float;

use super::dirichlet::{pairwise_sum, pairwise_sum_real, TauTable};
use super::quad::adaptive_gk;
use super::sieve::SieveTable;
use super::testfn::TestFunction;
use super::{fmt_shifts, Method, MomentReport};
use crate::error::{Error, Result};
use crate::shifts::NumericShiftSet;

/// Blocks per chunk; the reduction tree over chunks is fixed by this size.
pub const CHUNK_BLOCKS: usize = 128;
/// Default `psi_hat` cut level for the band.
pub const DEFAULT_EPS: f64 = 1e-10;
/// Width of a block in units of `x = c L`.
const BLOCK_WIDTH: f64 = 1.0;
/// Chebyshev points used to represent a block sum as a function of `u`.
const CHEB: usize = 20;

/// Partial result of one chunk of blocks.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ChunkSum {
    pub value: Complex64,
    /// `sum |a_m| |b_n|` over the pairs evaluated
    pub abs_band: f64,
}

/// Precomputed data for the correlation sum.
///
/// Integers are grouped into blocks of consecutive `n` whose logarithms span at
/// most `BLOCK_WIDTH / c`. With `Phi(x) = sum_j cw_j e(-x u_j)` a block pair
/// contributes `sum_j P_I(j) Q_J(j)`, where `P_I` and `Q_J` are the block sums
/// sampled at the transform nodes. Each block sum is a band-limited function
/// of `u`, recovered from `CHEB` Chebyshev samples.
pub struct CorrelationPlan<'a> {
    tf: &'a TestFunction,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    ln: Vec<f64>,
    c: f64,
    lam: f64,
    eps: f64,
    x: usize,
    t: f64,
    abs_tau_a: f64,
    mean_abs_tau_b: f64,
    shifts_a: Vec<f64>,
    shifts_b: Vec<f64>,
    start: Vec<usize>,
    mu: Vec<f64>,
    abs_a_blk: Vec<f64>,
    abs_b_blk: Vec<f64>,
    reach: f64,
    cheb: [f64; CHEB],
    interp: Vec<f64>,
}

impl<'a> CorrelationPlan<'a> {
    pub fn new(
        a: &NumericShiftSet,
        b: &NumericShiftSet,
        t: f64,
        x: u64,
        tf: &'a TestFunction,
        eps: f64,
        sieve: &SieveTable,
    ) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument("T must be positive".into()));
        }
        let ta = TauTable::new(a, x, sieve)?;
        let tb = TauTable::new(b, x, sieve)?;
        let lam = tf.lambda(eps)?;
        let c = t / (2.0 * PI);
        let n = x as usize;
        let mut ln = Vec::with_capacity(n + 1);
        ln.push(f64::NEG_INFINITY);
        let mut av = Vec::with_capacity(n + 1);
        let mut bv = Vec::with_capacity(n + 1);
        av.push(Complex64::new(0.0, 0.0));
        bv.push(Complex64::new(0.0, 0.0));
        for m in 1..=n {
            let l = (m as f64).ln();
            ln.push(l);
            let r = (m as f64).sqrt().recip();
            let ph = 3.0 * PI * c * l;
            av.push(Complex64::from_polar(ta.get(m) * r, -ph));
            bv.push(Complex64::from_polar(tb.get(m) * r, ph));
        }
        let abs_a: Vec<f64> = ta.values()[1..].iter().map(|v| v.abs()).collect();
        let abs_b: Vec<f64> = tb.values()[1..].iter().map(|v| v.abs()).collect();

        let h = BLOCK_WIDTH / c;
        let mut start = Vec::new();
        let mut mu = Vec::new();
        let mut abs_a_blk = Vec::new();
        let mut abs_b_blk = Vec::new();
        let mut m = 1;
        while m <= n {
            let first = m;
            while m + 1 <= n && ln[m + 1] - ln[first] <= h {
                m += 1;
            }
            start.push(first);
            mu.push(if m == first { ln[first] } else { 0.5 * (ln[first] + ln[m]) });
            abs_a_blk.push((first..=m).map(|k| av[k].norm()).sum());
            abs_b_blk.push((first..=m).map(|k| bv[k].norm()).sum());
            m += 1;
        }
        start.push(n + 1);

        let mut cheb = [0.0; CHEB];
        let mut bw = [0.0; CHEB];
        for k in 0..CHEB {
            let th = (2 * k + 1) as f64 * PI / (2 * CHEB) as f64;
            cheb[k] = 0.5 * th.cos();
            bw[k] = if k % 2 == 0 { th.sin() } else { -th.sin() };
        }
        let (u, _) = tf.transform_rule();
        let mut interp = Vec::with_capacity(u.len() * CHEB);
        for &uj in u {
            let mut row = [0.0; CHEB];
            match cheb.iter().position(|v| *v == uj) {
                Some(k) => row[k] = 1.0,
                None => {
                    let mut den = 0.0;
                    for k in 0..CHEB {
                        row[k] = bw[k] / (uj - cheb[k]);
                        den += row[k];
                    }
                    for v in row.iter_mut() {
                        *v /= den;
                    }
                }
            }
            interp.extend_from_slice(&row);
        }

        Ok(CorrelationPlan {
            tf,
            a: av,
            b: bv,
            ln,
            c,
            lam,
            eps,
            x: n,
            t,
            abs_tau_a: pairwise_sum_real(&abs_a),
            mean_abs_tau_b: pairwise_sum_real(&abs_b) / n.max(1) as f64,
            shifts_a: a.shifts().into(),
            shifts_b: b.shifts().into(),
            start,
            mu,
            abs_a_blk,
            abs_b_blk,
            reach: (lam + BLOCK_WIDTH) / c,
            cheb,
            interp,
        })
    }

    pub fn num_blocks(&self) -> usize {
        self.mu.len()
    }

    /// Fixed block ranges covering all blocks.
    pub fn chunks(&self) -> Vec<Range<usize>> {
        let nb = self.num_blocks();
        (0..nb).step_by(CHUNK_BLOCKS).map(|lo| lo..(lo + CHUNK_BLOCKS).min(nb)).collect()
    }

    /// Block sum of `coef` sampled at the transform nodes, with phase sign `sign`
    /// (`+1` for the `m` side, `-1` for the `n` side) and optional node weights.
    fn block_vec(&self, coef: &[Complex64], i: usize, sign: f64, weighted: bool, out: &mut Vec<Complex64>) {
        let (lo, hi) = (self.start[i], self.start[i + 1]);
        let mu = self.mu[i];
        let (u, cw) = self.tf.transform_rule();
        let k0 = -sign * 2.0 * PI * self.c;
        out.clear();
        if hi - lo == 1 {
            let v = coef[lo];
            for (uj, w) in u.iter().zip(cw) {
                let z = v * Complex64::from_polar(1.0, k0 * mu * uj);
                out.push(if weighted { z * *w } else { z });
            }
            return;
        }
        let mut samples = [Complex64::new(0.0, 0.0); CHEB];
        for m in lo..hi {
            let d = k0 * (self.ln[m] - mu);
            let v = coef[m];
            for (s, vk) in samples.iter_mut().zip(&self.cheb) {
                *s += v * Complex64::from_polar(1.0, d * vk);
            }
        }
        for (j, (uj, w)) in u.iter().zip(cw).enumerate() {
            let row = &self.interp[j * CHEB..(j + 1) * CHEB];
            let mut z = Complex64::new(0.0, 0.0);
            for (s, l) in samples.iter().zip(row) {
                z += s * l;
            }
            z *= Complex64::from_polar(1.0, k0 * mu * uj);
            out.push(if weighted { z * *w } else { z });
        }
    }

    pub fn eval_chunk(&self, blocks: Range<usize>) -> ChunkSum {
        let nb = self.num_blocks();
        let nodes = self.tf.transform_rule().0.len();
        let mut total = Complex64::new(0.0, 0.0);
        let mut abs_band = 0.0;
        if blocks.is_empty() {
            return ChunkSum::default();
        }
        let first = self.mu[blocks.start] - self.reach;
        let mut jlo = self.mu.partition_point(|v| *v < first);
        let mut jhi = jlo;
        let mut window = alloc::vec![Complex64::new(0.0, 0.0); nodes];
        let mut window_abs = 0.0;
        let mut held: VecDeque<Vec<Complex64>> = VecDeque::new();
        let mut p = Vec::with_capacity(nodes);
        for i in blocks {
            let (lo_mu, hi_mu) = (self.mu[i] - self.reach, self.mu[i] + self.reach);
            while jlo < nb && self.mu[jlo] < lo_mu {
                if jlo < jhi {
                    let q = held.pop_front().expect("window holds every block in range");
                    for (w, v) in window.iter_mut().zip(&q) {
                        *w -= v;
                    }
                    window_abs -= self.abs_b_blk[jlo];
                }
                jlo += 1;
            }
            jhi = jhi.max(jlo);
            while jhi < nb && self.mu[jhi] <= hi_mu {
                let mut q = Vec::with_capacity(nodes);
                self.block_vec(&self.b, jhi, -1.0, false, &mut q);
                for (w, v) in window.iter_mut().zip(&q) {
                    *w += v;
                }
                window_abs += self.abs_b_blk[jhi];
                held.push_back(q);
                jhi += 1;
            }
            if self.abs_a_blk[i] == 0.0 {
                continue;
            }
            self.block_vec(&self.a, i, 1.0, true, &mut p);
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, w) in p.iter().zip(&window) {
                acc += x * w;
            }
            total += acc;
            abs_band += self.abs_a_blk[i] * window_abs.max(0.0);
        }
        ChunkSum { value: total, abs_band }
    }

    /// Combine chunk results (in chunk order) into a report.
    pub fn finish(&self, parts: &[ChunkSum]) -> MomentReport {
        let vals: Vec<Complex64> = parts.iter().map(|p| p.value).collect();
        let abs: Vec<f64> = parts.iter().map(|p| p.abs_band).collect();
        let value = pairwise_sum(&vals);
        let abs_band = pairwise_sum_real(&abs);
        let tail = 2.0 * self.tf.tail_mass(self.lam) * self.mean_abs_tau_b * self.abs_tau_a / self.c;
        let numeric = 1e-13 * abs_band;
        MomentReport::new(Method::CorrelationSum, value, tail + numeric)
            .with("T", self.t)
            .with("X", self.x)
            .with("A", fmt_shifts(&self.shifts_a))
            .with("B", fmt_shifts(&self.shifts_b))
            .with("eps", self.eps)
            .with("Lambda", self.lam)
            .with("band_tail", tail)
            .with("blocks", self.num_blocks())
    }
}

/// `sum_{m, n <= X} tau_A(m) tau_B(n) psi_hat((T / 2 pi) log(m / n)) / sqrt(mn)` on the band.
pub fn correlation_sum(
    a: &NumericShiftSet,
    b: &NumericShiftSet,
    t: f64,
    x: u64,
    tf: &TestFunction,
    eps: f64,
    sieve: &SieveTable,
) -> Result<MomentReport> {
    let plan = CorrelationPlan::new(a, b, t, x, tf, eps, sieve)?;
    let parts: Vec<ChunkSum> = plan.chunks().into_iter().map(|r| plan.eval_chunk(r)).collect();
    Ok(plan.finish(&parts))
}

/// Pair-by-pair banded sum using the interpolated transform table.
pub fn correlation_sum_pairwise(
    a: &NumericShiftSet,
    b: &NumericShiftSet,
    t: f64,
    x: u64,
    tf: &TestFunction,
    eps: f64,
    sieve: &SieveTable,
) -> Result<Complex64> {
    let ta = TauTable::new(a, x, sieve)?;
    let tb = TauTable::new(b, x, sieve)?;
    let c = t / (2.0 * PI);
    let width = tf.lambda(eps)? / c;
    let n = x as usize;
    let ln: Vec<f64> = (0..=n).map(|m| (m.max(1) as f64).ln()).collect();
    let bv: Vec<Complex64> = (0..=n)
        .map(|m| if m == 0 { Complex64::new(0.0, 0.0) } else {
            Complex64::from_polar(tb.get(m) / (m as f64).sqrt(), 3.0 * PI * c * ln[m])
        })
        .collect();
    let mut rows = Vec::with_capacity(n);
    for m in 1..=n {
        let am = Complex64::from_polar(ta.get(m) / (m as f64).sqrt(), -3.0 * PI * c * ln[m]);
        let mf = m as f64;
        let lo = (mf * (-width).exp()).ceil().max(1.0) as usize;
        let hi = ((mf * width.exp()).floor() as usize).min(n);
        let mut row = Complex64::new(0.0, 0.0);
        for k in lo..=hi {
            row += tf.phi(c * (ln[m] - ln[k])) * bv[k];
        }
        rows.push(row * am);
    }
    Ok(pairwise_sum(&rows))
}

/// The full double sum without a band, for small `X` only.
pub fn correlation_sum_unbanded(
    a: &NumericShiftSet,
    b: &NumericShiftSet,
    t: f64,
    x: u64,
    tf: &TestFunction,
    sieve: &SieveTable,
) -> Result<Complex64> {
    let ta = TauTable::new(a, x, sieve)?;
    let tb = TauTable::new(b, x, sieve)?;
    let c = t / (2.0 * PI);
    let mut terms = Vec::new();
    for m in 1..=x as usize {
        for n in 1..=x as usize {
            let w = ta.get(m) * tb.get(n) / ((m * n) as f64).sqrt();
            terms.push(tf.psi_hat_direct(c * ((m as f64).ln() - (n as f64).ln())) * w);
        }
    }
    Ok(pairwise_sum(&terms))
}

/// Coefficients `tau(n) / sqrt(n)` and `log n` for evaluation on the critical line.
struct CriticalPoly {
    coef: Vec<f64>,
    ln: Vec<f64>,
}

impl CriticalPoly {
    fn new(tab: &TauTable) -> Self {
        let n = tab.len();
        let coef = (1..=n).map(|m| tab.get(m) / (m as f64).sqrt()).collect();
        let ln = (1..=n).map(|m| (m as f64).ln()).collect();
        CriticalPoly { coef, ln }
    }

    /// `D(1/2 + i sign t)` into a scratch buffer.
    fn eval(&self, t: f64, sign: f64, buf: &mut Vec<Complex64>) -> Complex64 {
        buf.clear();
        buf.extend(
            self.coef
                .iter()
                .zip(&self.ln)
                .map(|(c, l)| Complex64::from_polar(*c, -sign * t * l)),
        );
        pairwise_sum(buf)
    }
}

/// Relative tolerance used by [`direct_integral`].
pub const DIRECT_TOL: f64 = 1e-10;

/// `(1/T) int_T^{2T} psi(t/T) D_A(1/2 + it) D_B(1/2 - it) dt` by adaptive quadrature.
pub fn direct_integral(
    a: &NumericShiftSet,
    b: &NumericShiftSet,
    t: f64,
    x: u64,
    tf: &TestFunction,
    sieve: &SieveTable,
) -> Result<MomentReport> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument("T must be positive".into()));
    }
    let pa = CriticalPoly::new(&TauTable::new(a, x, sieve)?);
    let pb = CriticalPoly::new(&TauTable::new(b, x, sieve)?);
    // oscillation count over [1, 2] sets the starting partition
    let freq = t * (x.max(2) as f64).ln() / PI;
    let start = ((freq * 2.0) as usize).clamp(8, 1 << 16);
    let scale: f64 = pa.coef.iter().map(|v| v.abs()).sum::<f64>() * pb.coef.iter().map(|v| v.abs()).sum::<f64>();
    let mut buf = Vec::with_capacity(x as usize);
    let res = adaptive_gk(
        |tau| {
            let w = tf.psi(tau);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let da = pa.eval(tau * t, 1.0, &mut buf);
            let db = pb.eval(tau * t, -1.0, &mut buf);
            da * db * w
        },
        1.0,
        2.0,
        start,
        DIRECT_TOL * scale.max(1.0).sqrt(),
        1 << 20,
    )?;
    Ok(MomentReport::new(Method::DirectIntegral, res.value, res.error)
        .with("T", t)
        .with("X", x)
        .with("A", fmt_shifts(a.shifts()))
        .with("B", fmt_shifts(b.shifts()))
        .with("intervals", res.intervals))
}
