//! Gauss–Legendre rules and adaptive Gauss–Kronrod integration.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x.push(z);
        w.push(2.0 / ((1.0 - z * z) * dp * dp));
    }
    (x, w)
}

/// Composite rule: `panels` equal panels of an `n`-point rule on `[a, b]`.
#[derive(Clone, Debug)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * n);
        let mut weights = Vec::with_capacity(panels * n);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        CompositeRule { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).norm())
}

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

/// Adaptive Gauss–Kronrod 7/15 with a fixed bisection order (deterministic).
///
/// `start` initial equal panels; each panel is bisected until its error
/// estimate is below `tol * len / (b - a)`.
pub fn adaptive_gk<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, start: usize, tol: f64, max_intervals: usize) -> Result<QuadResult> {
    let total = b - a;
    let mut stack: Vec<(f64, f64, u32)> = Vec::new();
    let h = total / start as f64;
    for i in (0..start).rev() {
        stack.push((a + i as f64 * h, a + (i + 1) as f64 * h, 0));
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut intervals = 0;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e) = gk15(&mut f, lo, hi);
        let local_tol = tol * (hi - lo) / total;
        if e <= local_tol || depth >= 50 {
            if depth >= 50 && e > local_tol {
                return Err(Error::QuadratureNonConvergence(format!(
                    "interval [{lo}, {hi}] error {e:e} after 50 bisections"
                )));
            }
            value += v;
            error += e;
            intervals += 1;
            continue;
        }
        if intervals + stack.len() >= max_intervals {
            return Err(Error::QuadratureNonConvergence(format!(
                "more than {max_intervals} intervals required"
            )));
        }
        let mid = 0.5 * (lo + hi);
        stack.push((mid, hi, depth + 1));
        stack.push((lo, mid, depth + 1));
    }
    Ok(QuadResult {
        value,
        error,
        intervals,
    })
}
