//! The weight `psi` on `[1, 2]` and a tabulated Fourier transform.
//!
//! `psi_hat(x) = e^{-3 pi i x} Phi(x)` with `Phi(x) = int psi(t) e^{-2 pi i x (t - 3/2)} dt`.
//! `Phi` is smooth and slowly varying, so it is tabulated with derivatives on a
//! fine grid and evaluated by cubic Hermite interpolation.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use super::quad::CompositeRule;
use crate::error::{Error, Result};

const PANELS: usize = 64;
const NODES: usize = 20;
const STEPS_PER_UNIT: usize = 1024;
const X_END: f64 = 160.0;
const REANCHOR: usize = 512;

/// The default bump `exp(-1/((t-1)(2-t)))` on `(1, 2)`, unnormalized.
pub fn bump_shape(t: f64) -> f64 {
    if t <= 1.0 || t >= 2.0 {
        0.0
    } else {
        (-1.0 / ((t - 1.0) * (2.0 - t))).exp()
    }
}

/// Normalized smooth weight supported in `[1, 2]`, with cached transform.
#[derive(Clone, Debug)]
pub struct TestFunction {
    shape: fn(f64) -> f64,
    scale: f64,
    /// quadrature weight times `psi(node)`
    cw: Vec<f64>,
    /// `node - 3/2`
    u: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    step: f64,
    phi: Vec<Complex64>,
    /// derivative times `step`
    dphi: Vec<Complex64>,
    /// `env[k] = max_{j >= k} |Phi(j step)|`
    env: Vec<f64>,
    interp_err: f64,
}

impl TestFunction {
    /// The default normalized bump.
    pub fn bump() -> Self {
        Self::new(bump_shape).expect("bump has positive mass")
    }

    /// Normalize `shape` (vanishing outside `(1, 2)`) to unit mass and tabulate.
    pub fn new(shape: fn(f64) -> f64) -> Result<Self> {
        let rule = CompositeRule::new(1.0, 2.0, PANELS, NODES);
        let mass = rule.integrate(shape);
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidArgument("test function must have positive mass".into()));
        }
        let scale = 1.0 / mass;
        let cw: Vec<f64> = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(t, w)| w * shape(*t) * scale)
            .collect();
        let u: Vec<f64> = rule.nodes.iter().map(|t| t - 1.5).collect();
        let mut tf = TestFunction {
            shape,
            scale,
            cw,
            u,
            nodes: rule.nodes,
            weights: rule.weights,
            step: 1.0 / STEPS_PER_UNIT as f64,
            phi: Vec::new(),
            dphi: Vec::new(),
            env: Vec::new(),
            interp_err: 0.0,
        };
        tf.tabulate();
        Ok(tf)
    }

    fn tabulate(&mut self) {
        let n = (X_END * STEPS_PER_UNIT as f64) as usize + 2;
        let h = self.step;
        let rot: Vec<Complex64> = self.u.iter().map(|u| Complex64::from_polar(1.0, -2.0 * PI * h * u)).collect();
        let du: Vec<Complex64> = self
            .u
            .iter()
            .zip(&self.cw)
            .map(|(u, c)| Complex64::new(0.0, -2.0 * PI * u * c * h))
            .collect();
        let mut z: Vec<Complex64> = alloc::vec![Complex64::new(1.0, 0.0); self.u.len()];
        self.phi = Vec::with_capacity(n);
        self.dphi = Vec::with_capacity(n);
        for k in 0..n {
            if k % REANCHOR == 0 {
                let x = k as f64 * h;
                for (zi, u) in z.iter_mut().zip(&self.u) {
                    *zi = Complex64::from_polar(1.0, -2.0 * PI * x * u);
                }
            }
            let mut p = Complex64::new(0.0, 0.0);
            let mut dp = Complex64::new(0.0, 0.0);
            for i in 0..z.len() {
                p += z[i] * self.cw[i];
                dp += z[i] * du[i];
                z[i] *= rot[i];
            }
            self.phi.push(p);
            self.dphi.push(dp);
        }
        self.env = alloc::vec![0.0; n];
        let mut m: f64 = 0.0;
        for k in (0..n).rev() {
            m = m.max(self.phi[k].norm());
            self.env[k] = m;
        }
        // interpolation error probe at midpoints
        let mut err: f64 = 0.0;
        let probes = 997;
        for j in 0..probes {
            let x = (j as f64 + 0.5) * (X_END - 1.0) / probes as f64 + 0.5 * h;
            err = err.max((self.phi_interp(x) - self.phi_direct(x)).norm());
        }
        self.interp_err = 2.0 * err + 1e-16;
    }

    /// `psi(t)`, normalized.
    pub fn psi(&self, t: f64) -> f64 {
        (self.shape)(t) * self.scale
    }

    /// `int psi = psi_hat(0)`; one by construction, up to quadrature error.
    pub fn mass(&self) -> f64 {
        self.cw.iter().sum()
    }

    /// Quadrature nodes and weights on `[1, 2]` (for integrals against `psi`).
    pub fn rule(&self) -> (&[f64], &[f64]) {
        (&self.nodes, &self.weights)
    }

    /// Centered nodes `t - 3/2` and weights `w psi(t)`, so that
    /// `Phi(x) = sum_j cw_j e^{-2 pi i x u_j}` for `|x|` well inside the table range.
    pub fn transform_rule(&self) -> (&[f64], &[f64]) {
        (&self.u, &self.cw)
    }

    /// `int psi(t) g(t) dt` using the stored rule.
    pub fn integrate_against<F: FnMut(f64) -> Complex64>(&self, mut g: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.cw)
            .map(|(t, c)| g(*t) * *c)
            .sum()
    }

    fn phi_direct(&self, x: f64) -> Complex64 {
        if x.abs() < X_END {
            return self
                .u
                .iter()
                .zip(&self.cw)
                .map(|(u, c)| Complex64::from_polar(*c, -2.0 * PI * x * u))
                .sum();
        }
        // finer rule so that each panel sees a bounded number of periods
        let panels = (x.abs() as usize / 2).max(PANELS);
        let rule = CompositeRule::new(1.0, 2.0, panels, NODES);
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(t, w)| Complex64::from_polar(w * self.psi(*t), -2.0 * PI * x * (t - 1.5)))
            .sum()
    }

    /// `Phi(x)` from the table for `0 <= x < X_END`.
    #[inline]
    fn phi_interp(&self, x: f64) -> Complex64 {
        let s = x * STEPS_PER_UNIT as f64;
        let k = s as usize;
        let f = s - k as f64;
        let f2 = f * f;
        let f3 = f2 * f;
        let h00 = 2.0 * f3 - 3.0 * f2 + 1.0;
        let h10 = f3 - 2.0 * f2 + f;
        let h01 = -2.0 * f3 + 3.0 * f2;
        let h11 = f3 - f2;
        self.phi[k] * h00 + self.dphi[k] * h10 + self.phi[k + 1] * h01 + self.dphi[k + 1] * h11
    }

    /// `Phi(x)` for any real `x` from the table; zero past the table end, where
    /// `|Phi|` is below the scanned floor.
    #[inline]
    pub fn phi(&self, x: f64) -> Complex64 {
        let ax = x.abs();
        if ax >= X_END {
            return Complex64::new(0.0, 0.0);
        }
        let v = self.phi_interp(ax);
        if x < 0.0 {
            v.conj()
        } else {
            v
        }
    }

    /// `psi_hat(x) = int psi(t) e(-x t) dt` from the cached table.
    pub fn psi_hat(&self, x: f64) -> Complex64 {
        Complex64::from_polar(1.0, -3.0 * PI * x) * self.phi(x)
    }

    /// `psi_hat(x)` by direct quadrature (no table, any `x`).
    pub fn psi_hat_direct(&self, x: f64) -> Complex64 {
        Complex64::from_polar(1.0, -3.0 * PI * x) * self.phi_direct(x)
    }

    /// Upper estimate of the table interpolation error.
    pub fn interp_error(&self) -> f64 {
        self.interp_err
    }

    /// Smallest grid point `L` with `|psi_hat(x)| <= eps` for every scanned `|x| >= L`.
    pub fn lambda(&self, eps: f64) -> Result<f64> {
        let floor = *self.env.last().unwrap();
        if eps <= floor || eps <= self.interp_err {
            return Err(Error::InvalidArgument(format!(
                "eps = {eps:e} is below the resolvable level {:e}",
                floor.max(self.interp_err)
            )));
        }
        let k = self.env.partition_point(|&m| m > eps);
        Ok(k as f64 * self.step)
    }

    /// `2 int_L^{X_END} |psi_hat(x)| dx`, the mass of the transform outside `[-L, L]`.
    pub fn tail_mass(&self, lam: f64) -> f64 {
        let k0 = (lam / self.step) as usize;
        let s: f64 = self.phi[k0.min(self.phi.len())..].iter().map(|p| p.norm()).sum();
        2.0 * s * self.step
    }

    /// `Lambda(10^-j)` for `j = 4..=13` (pairs `(eps, Lambda)`).
    pub fn lambda_table(&self) -> Vec<(f64, f64)> {
        (4..=13)
            .filter_map(|j| {
                let eps = 10f64.powi(-j);
                self.lambda(eps).ok().map(|l| (eps, l))
            })
            .collect()
    }
}
