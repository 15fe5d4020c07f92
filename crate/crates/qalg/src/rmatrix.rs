//! R̄(u,η), the Gamma-product normalization r(u,η), R^±, the ZZ S-matrix,
//! and residual checks for unitarity, crossing, Yang-Baxter and
//! quasi-periodicity.

use crate::error::{QalgError, Result};
use crate::hyp::{cth, sh, th};
use crate::mat::{diag, eye, kron, max_abs, rel_diff, CMat};
use crate::specfun::{bernoulli_poly, hurwitz_zeta, log_gamma};
use crate::{C64, I};
use serde::Serialize;
use std::f64::consts::PI;

pub const DEFAULT_TRUNC: usize = 200;
/// Order of the asymptotic tail added to the truncated product.
pub const DEFAULT_TAIL_ORDER: usize = 6;
const POLE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraParams {
    pub hbar: f64,
    pub eta: f64,
    pub c: f64,
    pub eta_prime: f64,
    pub eta_dprime: f64,
}

impl AlgebraParams {
    pub fn new(hbar: f64, eta: f64, c: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(QalgError::Params(format!("hbar must be positive, got {hbar}")));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(QalgError::Params(format!("eta must be positive, got {eta}")));
        }
        if !c.is_finite() || hbar * c < 0.0 {
            return Err(QalgError::Params(format!("hbar*c must be nonnegative, got c = {c}")));
        }
        let eta_prime = eta / (1.0 + eta * hbar * c);
        Ok(AlgebraParams { hbar, eta, c, eta_prime, eta_dprime: 2.0 * eta * eta_prime / (eta + eta_prime) })
    }

    /// Copy with η′ scaled by `factor`, ignoring the constraint. Only for
    /// negative controls.
    pub fn perturbed_eta_prime(&self, factor: f64) -> Self {
        let ep = self.eta_prime * factor;
        AlgebraParams { eta_prime: ep, eta_dprime: 2.0 * self.eta * ep / (self.eta + ep), ..*self }
    }

    /// |1/η′ − 1/η − ℏc|.
    pub fn constraint_residual(&self) -> f64 {
        (1.0 / self.eta_prime - 1.0 / self.eta - self.hbar * self.c).abs()
    }

    /// Same ℏ, η with c = 0.
    pub fn at_level_zero(&self) -> Self {
        AlgebraParams::new(self.hbar, self.eta, 0.0).expect("valid params stay valid")
    }

    /// θ = πηℏ.
    pub fn theta(&self) -> f64 {
        PI * self.eta * self.hbar
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
    /// no τ factor: R(u,η) = r R̄
    Bare,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RMatrixValue {
    pub entries: CMat,
    pub u: C64,
    pub sign: Sign,
    pub truncation: usize,
}

/// 6-vertex pattern: only (0,0), (1,1), (1,2), (2,1), (2,2), (3,3) nonzero.
pub fn ice_rule_holds(m: &CMat) -> bool {
    let allowed = |i: usize, j: usize| (i == j) || (i == 1 && j == 2) || (i == 2 && j == 1);
    for i in 0..4 {
        for j in 0..4 {
            if !allowed(i, j) && m[(i, j)] != C64::new(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}

/// (b, c) entries of R̄.
pub fn rbar_entries(u: C64, p: &AlgebraParams) -> Result<(C64, C64)> {
    let den = sh(PI * p.eta * (u - I * p.hbar));
    if den.norm() < POLE_EPS {
        return Err(QalgError::Pole(format!("R-bar: sh(pi eta (u - i hbar)) = 0 at u = {u}")));
    }
    let b = sh(PI * p.eta * u) / den;
    let c = -sh(I * p.theta()) / den;
    Ok((b, c))
}

pub fn rbar(u: C64, p: &AlgebraParams) -> Result<CMat> {
    let (b, c) = rbar_entries(u, p)?;
    Ok(six_vertex(C64::new(1.0, 0.0), b, c))
}

fn six_vertex(a: C64, b: C64, c: C64) -> CMat {
    let mut m = diag(&[a, b, b, a]);
    m[(1, 2)] = c;
    m[(2, 1)] = c;
    m
}

fn log_rp(p: usize, y: C64, eps: f64) -> Result<C64> {
    let n = 2.0 * p as f64 * eps;
    Ok(log_gamma(y + n)? + log_gamma(y + 1.0 + n)?
        - log_gamma(y + n + eps)?
        - log_gamma(y + 1.0 + n - eps)?)
}

// the four y = iη·(u, iℏ−u, 0, iℏ) arguments with signs (+, +, −, −)
fn product_args(u: C64, p: &AlgebraParams) -> [(C64, f64); 4] {
    let eps = p.hbar * p.eta;
    let y = I * p.eta * u;
    [(y, 1.0), (-eps - y, 1.0), (C64::new(0.0, 0.0), -1.0), (C64::new(-eps, 0.0), -1.0)]
}

/// Asymptotic value of Σ_{p>trunc} of the log product, through order
/// `order` in 1/p. The 1/p term cancels between the four factors.
fn log_tail(u: C64, p: &AlgebraParams, trunc: usize, order: usize) -> C64 {
    let eps = p.hbar * p.eta;
    let mut acc = C64::new(0.0, 0.0);
    for k in 2..=order {
        let mut d = C64::new(0.0, 0.0);
        for (y, s) in product_args(u, p) {
            let dk = bernoulli_poly(k + 1, y) + bernoulli_poly(k + 1, y + 1.0)
                - bernoulli_poly(k + 1, y + eps)
                - bernoulli_poly(k + 1, y + 1.0 - eps);
            d += dk * s;
        }
        let sgn = if k % 2 == 1 { 1.0 } else { -1.0 };
        let coef = sgn / ((k * (k + 1)) as f64 * (2.0 * eps).powi(k as i32));
        acc += d * coef * hurwitz_zeta(k as u32, trunc as f64 + 1.0);
    }
    acc
}

/// log r(u,η) with the product truncated at `trunc` and an asymptotic tail of
/// order `tail_order` (0 for the bare truncated product).
pub fn log_r_scalar(u: C64, p: &AlgebraParams, trunc: usize, tail_order: usize) -> Result<C64> {
    let eps = p.hbar * p.eta;
    let y = I * p.eta * u;
    let mut acc = log_gamma(C64::new(eps, 0.0))? + log_gamma(y + 1.0)? - log_gamma(y + eps)?;
    for k in 1..=trunc {
        for (yy, s) in product_args(u, p) {
            acc += log_rp(k, yy, eps)? * s;
        }
    }
    if tail_order >= 2 {
        acc += log_tail(u, p, trunc, tail_order);
    }
    Ok(acc)
}

/// r(u,η): truncated product plus asymptotic tail, guarded by comparing the
/// result at `trunc` and `2 trunc`.
pub fn r_scalar(u: C64, p: &AlgebraParams, trunc: usize) -> Result<C64> {
    let trunc = trunc.max(1);
    let a = log_r_scalar(u, p, trunc, DEFAULT_TAIL_ORDER)?;
    let b = log_r_scalar(u, p, 2 * trunc, DEFAULT_TAIL_ORDER)?;
    let d = (a - b).norm();
    if !(d < 1e-9) {
        return Err(QalgError::NonConvergence { what: format!("r(u) product at u = {u}"), est: d, tol: 1e-9 });
    }
    Ok(b.exp())
}

/// Bare truncated product, no tail and no guard (for truncation studies).
pub fn r_scalar_raw(u: C64, p: &AlgebraParams, trunc: usize) -> Result<C64> {
    Ok(log_r_scalar(u, p, trunc, 0)?.exp())
}

pub fn tau(u: C64, sign: Sign, p: &AlgebraParams) -> Result<C64> {
    let x = PI * u / (2.0 * p.hbar);
    match sign {
        Sign::Plus => {
            if sh(x).norm() < POLE_EPS {
                return Err(QalgError::Pole(format!("tau+: cth(pi u / 2 hbar) at u = {u}")));
            }
            Ok(cth(x))
        }
        Sign::Minus => {
            if x.cosh().norm() < POLE_EPS {
                return Err(QalgError::Pole(format!("tau-: th(pi u / 2 hbar) at u = {u}")));
            }
            Ok(th(x))
        }
        Sign::Bare => Ok(C64::new(1.0, 0.0)),
    }
}

/// τ^±(u) r(u,η) R̄(u,η).
pub fn r_full(u: C64, sign: Sign, p: &AlgebraParams, trunc: usize) -> Result<RMatrixValue> {
    let t = tau(u, sign, p)?;
    let rb = rbar(u, p)?;
    // r is still evaluated at τ-zeros so its own poles are reported
    let r = r_scalar(u, p, trunc)?;
    Ok(RMatrixValue { entries: rb * (t * r), u, sign, truncation: trunc })
}

fn sigma_z() -> CMat {
    diag(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)])
}

/// ZZ S-matrix −(σz⊗1) R(β, 1/ξ) (1⊗σz) at ℏ = π.
pub fn smatrix_zz(beta: C64, xi: f64, trunc: usize) -> Result<RMatrixValue> {
    let p = AlgebraParams::new(PI, 1.0 / xi, 0.0)?;
    let r = r_full(beta, Sign::Bare, &p, trunc)?;
    let s = kron(&sigma_z(), &eye(2));
    let t = kron(&eye(2), &sigma_z());
    Ok(RMatrixValue { entries: -(s * r.entries * t), u: beta, sign: Sign::Bare, truncation: trunc })
}

/// ‖R(u)R(−u) − Id‖_max for R = r R̄. The τ factors are scalars and are
/// not part of the identity, so `sign` only labels the channel.
pub fn check_unitarity(u: C64, _sign: Sign, p: &AlgebraParams, trunc: usize) -> Result<f64> {
    let a = r_full(u, Sign::Bare, p, trunc)?.entries;
    let b = r_full(-u, Sign::Bare, p, trunc)?.entries;
    Ok(max_abs(&(a * b - eye(4))))
}

/// Partial transpose in the first factor: N[(i,k),(j,l)] = M[(j,k),(i,l)].
pub fn transpose_first(m: &CMat) -> CMat {
    let mut n = m.clone();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    n[(2 * i + k, 2 * j + l)] = m[(2 * j + k, 2 * i + l)];
                }
            }
        }
    }
    n
}

pub fn charge_conjugation() -> CMat {
    let mut c = crate::mat::zeros(2, 2);
    c[(0, 1)] = C64::new(1.0, 0.0);
    c[(1, 0)] = C64::new(-1.0, 0.0);
    c
}

/// ‖(C̃⊗1) R(u) (C̃⊗1) − R(iℏ−u)^{t₁}‖_max, relative to the larger side.
pub fn check_crossing(u: C64, p: &AlgebraParams, trunc: usize) -> Result<f64> {
    let cc = kron(&charge_conjugation(), &eye(2));
    let a = r_full(u, Sign::Bare, p, trunc)?.entries;
    let b = r_full(I * p.hbar - u, Sign::Bare, p, trunc)?.entries;
    let lhs = &cc * a * &cc;
    Ok(rel_diff(&lhs, &transpose_first(&b)))
}

fn embed12(r: &CMat) -> CMat {
    kron(r, &eye(2))
}

fn embed23(r: &CMat) -> CMat {
    kron(&eye(2), r)
}

fn swap23() -> CMat {
    let mut p = crate::mat::zeros(8, 8);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                p[(4 * a + 2 * c + b, 4 * a + 2 * b + c)] = C64::new(1.0, 0.0);
            }
        }
    }
    p
}

/// Yang-Baxter residual for a matrix-valued function of the spectral
/// parameter, relative to the larger side.
pub fn ybe_residual_with<F: Fn(C64) -> Result<CMat>>(r: F, u1: C64, u2: C64, u3: C64) -> Result<f64> {
    let r12 = embed12(&r(u1 - u2)?);
    let p = swap23();
    let r13 = &p * embed12(&r(u1 - u3)?) * &p;
    let r23 = embed23(&r(u2 - u3)?);
    let lhs = &r12 * &r13 * &r23;
    let rhs = &r23 * &r13 * &r12;
    Ok(rel_diff(&lhs, &rhs))
}

pub fn check_ybe(u1: C64, u2: C64, u3: C64, p: &AlgebraParams, trunc: usize) -> Result<f64> {
    ybe_residual_with(|u| Ok(r_full(u, Sign::Bare, p, trunc)?.entries), u1, u2, u3)
}

/// Which factor carries the σz twist in the quasi-periodicity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Twist {
    First,
    Second,
}

/// ‖R^+(z − i/η) − (σ⊗1) R^−(z) (σ⊗1)‖_max relative to the larger side.
pub fn check_quasiperiodicity_twist(z: C64, twist: Twist, p: &AlgebraParams, trunc: usize) -> Result<f64> {
    let lhs = r_full(z - I / p.eta, Sign::Plus, p, trunc)?.entries;
    let rm = r_full(z, Sign::Minus, p, trunc)?.entries;
    let s = match twist {
        Twist::First => kron(&sigma_z(), &eye(2)),
        Twist::Second => kron(&eye(2), &sigma_z()),
    };
    Ok(rel_diff(&lhs, &(&s * rm * &s)))
}

pub fn check_quasiperiodicity(z: C64, p: &AlgebraParams, trunc: usize) -> Result<f64> {
    check_quasiperiodicity_twist(z, Twist::First, p, trunc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: f64, b: f64) -> C64 {
        C64::new(a, b)
    }

    fn params() -> AlgebraParams {
        AlgebraParams::new(0.3, 0.7, 0.0).unwrap()
    }

    #[test]
    fn params_constraint() {
        let p = AlgebraParams::new(0.3, 0.7, 1.0).unwrap();
        assert!((p.eta_prime - 0.7 / 1.21).abs() < 1e-15);
        assert!(p.constraint_residual() < 1e-14);
        assert!(AlgebraParams::new(0.3, 0.7, -1.0).is_err());
        assert_eq!(params().eta_prime, 0.7);
        assert!(p.perturbed_eta_prime(1.01).constraint_residual() > 1e-2);
    }

    #[test]
    fn rbar_special_points() {
        let p = params();
        let (b, cc) = rbar_entries(c(0.0, 0.0), &p).unwrap();
        assert!(b.norm() < 1e-15 && (cc - 1.0).norm() < 1e-14);
        let (b, cc) = rbar_entries(c(0.0, 0.15), &p).unwrap();
        assert!((b + 1.0).norm() < 1e-14);
        assert!((cc - 2.0 * (p.theta() / 2.0).cos()).norm() < 1e-14);
        assert!(matches!(rbar_entries(c(0.0, 0.3), &p), Err(QalgError::Pole(_))));
    }

    #[test]
    fn b2_minus_c2_reduction() {
        let p = params();
        let u = c(0.37, -0.21);
        let (b, cc) = rbar_entries(u, &p).unwrap();
        let ex = sh(PI * p.eta * (u + I * p.hbar)) / sh(PI * p.eta * (u - I * p.hbar));
        assert!((b * b - cc * cc - ex).norm() < 1e-12);
    }

    #[test]
    fn r_at_zero_is_one() {
        let r = r_scalar(c(0.0, 0.0), &params(), 50).unwrap();
        assert!((r - 1.0).norm() < 1e-13);
    }

    #[test]
    fn tail_makes_truncation_converge() {
        let p = params();
        let u = c(0.4, 0.0);
        let a = log_r_scalar(u, &p, 200, DEFAULT_TAIL_ORDER).unwrap();
        let b = log_r_scalar(u, &p, 400, DEFAULT_TAIL_ORDER).unwrap();
        assert!((a - b).norm() < 1e-10);
        // the bare product converges only like 1/trunc
        let ra = log_r_scalar(u, &p, 200, 0).unwrap();
        assert!((ra - b).norm() > 1e-7);
    }

    #[test]
    fn bare_truncation_error_is_monotone() {
        let p = params();
        let u = c(0.8, 0.1);
        let best = log_r_scalar(u, &p, 800, DEFAULT_TAIL_ORDER).unwrap();
        let mut last = f64::INFINITY;
        for &t in &[25, 50, 100, 200, 400] {
            let e = (log_r_scalar(u, &p, t, 0).unwrap() - best).norm();
            assert!(e < last, "trunc {t}");
            last = e;
        }
    }

    #[test]
    fn tau_poles_and_zeros() {
        let p = params();
        assert!(matches!(r_full(c(0.0, 0.0), Sign::Plus, &p, 20), Err(QalgError::Pole(_))));
        let m = r_full(c(0.0, 0.0), Sign::Minus, &p, 20).unwrap();
        assert!(max_abs(&m.entries) == 0.0);
        let m = r_full(c(0.5, 0.0), Sign::Plus, &p, 200).unwrap();
        assert!(ice_rule_holds(&m.entries));
    }

    #[test]
    fn unitarity_and_symmetry() {
        let p = params();
        let a = check_unitarity(c(0.8, 0.0), Sign::Bare, &p, 200).unwrap();
        let b = check_unitarity(c(-0.8, 0.0), Sign::Bare, &p, 200).unwrap();
        assert!(a < 1e-8 && b < 1e-8);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn smatrix_unitarity() {
        let s1 = smatrix_zz(c(0.6, 0.0), 1.4, 200).unwrap();
        let s2 = smatrix_zz(c(-0.6, 0.0), 1.4, 200).unwrap();
        assert!(max_abs(&(s1.entries.clone() * s2.entries - eye(4))) < 1e-8);
        assert!(ice_rule_holds(&s1.entries));
    }

    #[test]
    fn crossing_at_pi_and_general_hbar() {
        let cc = charge_conjugation();
        assert!(max_abs(&(&cc * &cc + eye(2))) == 0.0);
        let p = AlgebraParams::new(PI, 0.25, 0.0).unwrap();
        assert!(check_crossing(c(0.9, 0.3), &p, 200).unwrap() < 1e-8);
        // informational in the suites, but it holds here too
        assert!(check_crossing(c(0.9, 0.3), &params(), 200).unwrap() < 1e-8);
    }

    #[test]
    fn ybe_cases() {
        let p = params();
        assert!(check_ybe(c(0.9, 0.0), c(0.4, 0.0), c(-0.2, 0.0), &p, 200).unwrap() < 1e-8);
        assert!(check_ybe(c(0.4, 0.0), c(0.4, 0.0), c(-0.2, 0.0), &p, 200).unwrap() < 1e-10);
        let bare = ybe_residual_with(|u| rbar(u, &p), c(0.9, 0.1), c(0.4, 0.0), c(-0.2, 0.3)).unwrap();
        assert!(bare < 1e-12);
    }

    #[test]
    fn quasiperiodicity_both_twists() {
        let p = params();
        let z = c(0.5, -0.2);
        let a = check_quasiperiodicity_twist(z, Twist::First, &p, 200).unwrap();
        let b = check_quasiperiodicity_twist(z, Twist::Second, &p, 200).unwrap();
        assert!(a < 1e-7 && b < 1e-7);
        assert!((a - b).abs() < 1e-12);
    }
}
