//! Ordering kernels φ(τ) and the resummation of their iterated
//! convolutions. Kernels are applied through their closed-form Fourier
//! symbols φ̂(k) = ∫ φ(τ) e^{ikτ} dτ on a zero-padded FFT grid; since φ
//! has a 1/τ principal-value singularity, the series is tested against a
//! smooth profile (a normalised Gaussian) rather than sampled pointwise.
//!
//! For the (ha-ha) kinds the kernel φ(τ−τ′)+φ(τ+τ′) acts on the half
//! line; on odd extensions this is g ↦ −sgn(τ)·(φ * g), which no longer
//! commutes with translations, so the geometric sum is solved with GMRES.

use super::kappa_symbol;
use crate::error::{QalgError, Result};
use crate::quad::adaptive;
use crate::rmatrix::AlgebraParams;
use crate::{C64, I};
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderingKind {
    He,
    Hf,
    Ee,
    Ff,
    Hh,
}

impl OrderingKind {
    pub const ALL: [OrderingKind; 5] = [Self::He, Self::Hf, Self::Ee, Self::Ff, Self::Hh];

    pub fn name(self) -> &'static str {
        match self {
            Self::He => "he",
            Self::Hf => "hf",
            Self::Ee => "ee",
            Self::Ff => "ff",
            Self::Hh => "hh",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim_end_matches("-type");
        Self::ALL.iter().copied().find(|k| k.name() == s)
    }

    /// Uses the symmetrised half-line kernel.
    pub fn is_same_current(self) -> bool {
        matches!(self, Self::Ee | Self::Ff | Self::Hh)
    }

    // exponential decay rate of φ(τ)
    fn decay(self, p: &AlgebraParams) -> f64 {
        match self {
            Self::He | Self::Ee => 1.0 / (2.0 * p.eta),
            Self::Hf | Self::Ff => 1.0 / (2.0 * p.eta_prime),
            Self::Hh => 1.0 / (2.0 * p.eta.max(p.eta_prime)),
        }
    }

    /// φ̂(k) in closed form.
    pub fn symbol(self, k: f64, p: &AlgebraParams) -> C64 {
        let t = (PI * p.eta * p.hbar).tanh();
        let tp = (PI * p.eta_prime * p.hbar).tanh();
        match self {
            Self::He => I * t * (PI * p.eta * k).tanh(),
            Self::Hf => -I * tp * (PI * p.eta_prime * k).tanh(),
            Self::Ee if k == 0.0 => C64::new(0.0, 0.0),
            Self::Ff if k == 0.0 => C64::new(0.0, 0.0),
            Self::Ee => -I * t / (PI * p.eta * k).tanh(),
            Self::Ff => I * tp / (PI * p.eta_prime * k).tanh(),
            Self::Hh => -kappa_symbol(k, p),
        }
    }

    /// φ(τ) itself for the sh/th kinds (τ ≠ 0).
    pub fn kernel(self, tau: f64, p: &AlgebraParams) -> Result<f64> {
        let t = (PI * p.eta * p.hbar).tanh();
        let tp = (PI * p.eta_prime * p.hbar).tanh();
        Ok(match self {
            Self::He => t / (2.0 * PI * p.eta * (tau / (2.0 * p.eta)).sinh()),
            Self::Hf => -tp / (2.0 * PI * p.eta_prime * (tau / (2.0 * p.eta_prime)).sinh()),
            Self::Ee => -t / (2.0 * PI * p.eta * (tau / (2.0 * p.eta)).tanh()),
            Self::Ff => tp / (2.0 * PI * p.eta_prime * (tau / (2.0 * p.eta_prime)).tanh()),
            Self::Hh => -super::kappa_kernel(tau, p)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OrderingMethod {
    Series(usize),
    Resummed,
}

/// Discretisation of the τ line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderingGrid {
    /// half window in units of 1/α, α the decay rate of φ
    pub window: f64,
    pub points: usize,
    pub padding: usize,
    /// width of the Gaussian test profile
    pub sigma: f64,
    /// centre of the half-line seed for the (ha-ha) kinds
    pub seed_centre: f64,
}

impl Default for OrderingGrid {
    fn default() -> Self {
        OrderingGrid { window: 40.0, points: 1 << 14, padding: 2, sigma: 0.5, seed_centre: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub kind: OrderingKind,
    pub sup_phi_hat: f64,
    pub terms: usize,
    /// max |S_{2k} − S_k| over the grid for k = 1, 2, 4, ...
    pub cauchy_diffs: Vec<f64>,
    /// relative residual of the linear solve (resummed, (ha-ha) kinds)
    pub solve_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingValue {
    pub tau: f64,
    pub value: f64,
    pub report: ConvergenceReport,
}

pub struct OrderingProbe {
    pub kind: OrderingKind,
    pub params: AlgebraParams,
    pub grid: OrderingGrid,
    pub tau: Vec<f64>,
    dtau: f64,
    mult: Vec<C64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    sup: f64,
}

impl OrderingProbe {
    pub fn new(kind: OrderingKind, params: &AlgebraParams, grid: OrderingGrid) -> Result<Self> {
        if kind == OrderingKind::Hh && !(params.hbar * params.c > 0.0) {
            return Err(QalgError::Precondition("hh kernel needs ℏc > 0".into()));
        }
        if grid.points < 16 || grid.padding < 1 {
            return Err(QalgError::Params("ordering grid too small".into()));
        }
        let half = grid.window / kind.decay(params);
        let n = grid.points;
        let dtau = 2.0 * half / n as f64;
        // symmetric grid avoiding τ = 0
        let tau: Vec<f64> = (0..n).map(|j| (j as f64 - n as f64 / 2.0 + 0.5) * dtau).collect();
        let m = n * grid.padding;
        let mut mult = vec![C64::new(0.0, 0.0); m];
        let mut sup: f64 = 0.0;
        for (j, slot) in mult.iter_mut().enumerate() {
            if j == 0 || 2 * j == m {
                continue;
            }
            let jj = if 2 * j < m { j as f64 } else { j as f64 - m as f64 };
            let k = 2.0 * PI * jj / (m as f64 * dtau);
            let s = kind.symbol(k, params);
            sup = sup.max(s.norm());
            // the forward transform uses e^{−ikτ}
            *slot = kind.symbol(-k, params);
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        Ok(OrderingProbe { kind, params: *params, grid, tau, dtau, mult, fwd, inv, sup })
    }

    pub fn sup_phi_hat(&self) -> f64 {
        self.sup
    }

    pub fn step(&self) -> f64 {
        self.dtau
    }

    fn transform(&self, v: &[C64], f: impl Fn(usize, C64) -> C64) -> Vec<C64> {
        let m = self.mult.len();
        let mut buf = vec![C64::new(0.0, 0.0); m];
        buf[..v.len()].copy_from_slice(v);
        self.fwd.process(&mut buf);
        for (j, b) in buf.iter_mut().enumerate() {
            *b = f(j, *b);
        }
        self.inv.process(&mut buf);
        buf.truncate(v.len());
        for b in buf.iter_mut() {
            *b /= m as f64;
        }
        buf
    }

    /// φ * v on the grid.
    pub fn convolve(&self, v: &[C64]) -> Vec<C64> {
        self.transform(v, |j, b| b * self.mult[j])
    }

    // g ↦ −sgn(τ)(φ * g) on odd extensions
    fn half_line(&self, g: &[C64]) -> Vec<C64> {
        let mut h = self.convolve(g);
        for (x, t) in h.iter_mut().zip(&self.tau) {
            *x *= -t.signum();
        }
        h
    }

    fn apply(&self, v: &[C64]) -> Vec<C64> {
        if self.kind.is_same_current() {
            self.half_line(v)
        } else {
            self.convolve(v)
        }
    }

    /// The smooth test profile the kernel series acts on.
    pub fn seed(&self) -> Vec<C64> {
        let s = self.grid.sigma;
        let w = |t: f64| (-(t / s).powi(2) / 2.0).exp() / (s * (2.0 * PI).sqrt());
        let a = self.grid.seed_centre;
        self.tau
            .iter()
            .map(|&t| if self.kind.is_same_current() { C64::new(w(t - a) - w(t + a), 0.0) } else { C64::new(w(t), 0.0) })
            .collect()
    }

    /// Partial sums S_N = Σ_{m=1}^{N+1} K^m w for all N ≤ n.
    pub fn series_partial_sums(&self, n: usize) -> Vec<Vec<C64>> {
        let mut term = self.seed();
        let mut acc = vec![C64::new(0.0, 0.0); term.len()];
        let mut out = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            term = self.apply(&term);
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            out.push(acc.clone());
        }
        out
    }

    pub fn series(&self, n: usize) -> Vec<C64> {
        self.series_partial_sums(n).pop().unwrap()
    }

    /// Σ_{m≥1} K^m w in closed form; returns the profile and the relative
    /// residual of the linear solve (zero for the diagonal case).
    pub fn resummed(&self) -> Result<(Vec<C64>, f64)> {
        if self.sup >= 1.0 {
            return Err(QalgError::Divergence(self.sup));
        }
        let w = self.seed();
        if !self.kind.is_same_current() {
            let r = self.transform(&w, |j, b| {
                let s = self.mult[j];
                b * s / (1.0 - s)
            });
            return Ok((r, 0.0));
        }
        let b = self.half_line(&w);
        let op = |x: &[C64]| -> Vec<C64> {
            let k = self.half_line(x);
            x.iter().zip(&k).map(|(a, c)| a - c).collect()
        };
        let (x, res) = gmres(&op, &b, 1e-13, 40, 400);
        if res > 1e-9 {
            return Err(QalgError::NonConvergence { what: "ordering resummation".into(), est: res, tol: 1e-9 });
        }
        Ok((x, res))
    }

    /// Value of a grid profile at τ by 4-point interpolation.
    pub fn sample(&self, profile: &[C64], tau: f64) -> f64 {
        let x = (tau - self.tau[0]) / self.dtau;
        let n = profile.len();
        let j = (x.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let t = x - j as f64;
        let mut acc = 0.0;
        for a in 0..4 {
            let mut w = 1.0;
            for b in 0..4 {
                if a != b {
                    w *= (t - b as f64) / (a as f64 - b as f64);
                }
            }
            acc += profile[j + a].re * w;
        }
        acc
    }

    /// max |series(n) − resummed| over the grid.
    pub fn series_vs_resummed(&self, n: usize) -> Result<f64> {
        let (r, _) = self.resummed()?;
        Ok(max_diff(&self.series(n), &r))
    }
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Restarted GMRES for A x = b. Returns x and ‖b − Ax‖/‖b‖.
pub fn gmres<F: Fn(&[C64]) -> Vec<C64>>(a: &F, b: &[C64], tol: f64, restart: usize, max_iter: usize) -> (Vec<C64>, f64) {
    let n = b.len();
    let bn = norm(b);
    let mut x = vec![C64::new(0.0, 0.0); n];
    if bn == 0.0 {
        return (x, 0.0);
    }
    let mut iters = 0;
    loop {
        let ax = a(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let beta = norm(&r);
        if beta / bn < tol || iters >= max_iter {
            return (x, beta / bn);
        }
        let mut v: Vec<Vec<C64>> = vec![r.iter().map(|z| z / beta).collect()];
        let mut h = vec![vec![C64::new(0.0, 0.0); restart]; restart + 1];
        let mut cs = vec![C64::new(0.0, 0.0); restart];
        let mut sn = vec![C64::new(0.0, 0.0); restart];
        let mut g = vec![C64::new(0.0, 0.0); restart + 1];
        g[0] = C64::new(beta, 0.0);
        let mut k_used = 0;
        for k in 0..restart {
            iters += 1;
            let mut w = a(&v[k]);
            for (i, vi) in v.iter().enumerate() {
                let hik = dot(vi, &w);
                h[i][k] = hik;
                for (wj, vj) in w.iter_mut().zip(vi) {
                    *wj -= hik * vj;
                }
            }
            let wn = norm(&w);
            h[k + 1][k] = C64::new(wn, 0.0);
            for i in 0..k {
                let t = cs[i].conj() * h[i][k] + sn[i].conj() * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let den = (h[k][k].norm_sqr() + h[k + 1][k].norm_sqr()).sqrt();
            cs[k] = h[k][k] / den;
            sn[k] = h[k + 1][k] / den;
            h[k][k] = C64::new(den, 0.0);
            h[k + 1][k] = C64::new(0.0, 0.0);
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k].conj() * g[k];
            k_used = k + 1;
            if g[k + 1].norm() / bn < tol || wn == 0.0 {
                break;
            }
            v.push(w.iter().map(|z| z / wn).collect());
        }
        // back substitution
        let mut y = vec![C64::new(0.0, 0.0); k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&v[j]) {
                *xi += yj * vi;
            }
        }
    }
}

/// PV ∫ φ(s) w(τ − s) ds by direct quadrature, folded with the oddness of φ.
pub fn direct_convolution<W: Fn(f64) -> f64>(kind: OrderingKind, w: &W, tau: f64, p: &AlgebraParams) -> Result<f64> {
    if !matches!(kind, OrderingKind::He | OrderingKind::Hf) {
        return Err(QalgError::Precondition("direct convolution is implemented for he/hf kernels".into()));
    }
    let f = |s: f64| C64::new(kind.kernel(s, p).unwrap_or(0.0) * (w(tau - s) - w(tau + s)), 0.0);
    let ext = tau.abs() + 60.0 / kind.decay(p).min(1.0);
    let br: Vec<f64> = (1..200).map(|k| ext * k as f64 / 200.0).chain([tau.abs()]).collect();
    let r = adaptive(&f, 0.0, ext, &br, 1e-15, 1e-13, 20_000);
    Ok(r.value.re)
}

/// One ordering-kernel evaluation with the default grid.
pub fn ordering_kernel(kind: OrderingKind, tau: f64, params: &AlgebraParams, method: OrderingMethod) -> Result<OrderingValue> {
    let probe = OrderingProbe::new(kind, params, OrderingGrid::default())?;
    let sup = probe.sup_phi_hat();
    match method {
        OrderingMethod::Series(n) => {
            if n < 1 {
                return Err(QalgError::Params("series(N) needs N >= 1".into()));
            }
            let sums = probe.series_partial_sums(n);
            let mut diffs = Vec::new();
            let mut k = 1;
            while 2 * k <= n {
                diffs.push(max_diff(&sums[2 * k], &sums[k]));
                k *= 2;
            }
            let decreasing = diffs.windows(2).all(|w| w[1] < w[0]);
            let value = probe.sample(&sums[n], tau);
            Ok(OrderingValue {
                tau,
                value,
                report: ConvergenceReport {
                    kind,
                    sup_phi_hat: sup,
                    terms: n,
                    cauchy_diffs: diffs,
                    solve_residual: 0.0,
                    converged: sup < 1.0 && decreasing,
                },
            })
        }
        OrderingMethod::Resummed => {
            let (r, res) = probe.resummed()?;
            Ok(OrderingValue {
                tau,
                value: probe.sample(&r, tau),
                report: ConvergenceReport {
                    kind,
                    sup_phi_hat: sup,
                    terms: 0,
                    cauchy_diffs: vec![],
                    solve_residual: res,
                    converged: true,
                },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gate() -> AlgebraParams {
        AlgebraParams::new(0.1, 1.0, 1.0).unwrap()
    }

    #[test]
    fn symbols_are_odd_and_imaginary() {
        let p = gate();
        for kind in OrderingKind::ALL {
            for &k in &[0.3, 1.7, 5.0] {
                let a = kind.symbol(k, &p);
                let b = kind.symbol(-k, &p);
                assert!((a + b).norm() < 1e-14);
                assert!(a.re.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn fft_convolution_matches_direct_quadrature() {
        let p = AlgebraParams::new(0.3, 0.7, 1.0).unwrap();
        for kind in [OrderingKind::He, OrderingKind::Hf] {
            let probe = OrderingProbe::new(kind, &p, OrderingGrid::default()).unwrap();
            let seed = probe.seed();
            let conv = probe.convolve(&seed);
            let s = probe.grid.sigma;
            let w = |t: f64| (-(t / s).powi(2) / 2.0).exp() / (s * (2.0 * PI).sqrt());
            for &j in &[8192usize, 8300, 8500, 9000] {
                let t = probe.tau[j];
                let d = direct_convolution(kind, &w, t, &p).unwrap();
                assert!((conv[j].re - d).abs() < 1e-8, "{kind:?} τ={t}: {} vs {d}", conv[j].re);
                assert!(conv[j].im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gate_point_converges() {
        let p = gate();
        for kind in [OrderingKind::He, OrderingKind::Hf, OrderingKind::Hh] {
            let probe = OrderingProbe::new(kind, &p, OrderingGrid::default()).unwrap();
            assert!(probe.sup_phi_hat() < 1.0);
            let d = probe.series_vs_resummed(20).unwrap();
            assert!(d < 1e-6, "{kind:?}: {d}");
        }
        let v = ordering_kernel(OrderingKind::He, 1.0, &p, OrderingMethod::Series(8)).unwrap();
        assert!(v.report.converged);
    }

    #[test]
    fn cth_kinds_diverge() {
        let p = gate();
        for kind in [OrderingKind::Ee, OrderingKind::Ff] {
            let probe = OrderingProbe::new(kind, &p, OrderingGrid::default()).unwrap();
            assert!(probe.sup_phi_hat() >= 1.0);
            assert!(matches!(probe.resummed(), Err(QalgError::Divergence(_))));
        }
    }

    #[test]
    fn vanishing_hbar_kills_the_kernel() {
        let p = AlgebraParams::new(1e-9, 1.0, 1.0).unwrap();
        let v = ordering_kernel(OrderingKind::He, 0.7, &p, OrderingMethod::Resummed).unwrap();
        assert!(v.value.abs() < 1e-8);
    }

    #[test]
    fn gmres_solves_a_small_system() {
        let a = |x: &[C64]| vec![x[0] * 2.0 + x[1], x[0] + x[1] * 3.0];
        let b = [C64::new(1.0, 0.0), C64::new(2.0, 1.0)];
        let (x, r) = gmres(&a, &b, 1e-14, 5, 20);
        assert!(r < 1e-13);
        let ax = a(&x);
        assert!((ax[1] - b[1]).norm() < 1e-12);
    }
}
