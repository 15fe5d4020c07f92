//! Scalar Riemann problem on a strip. Half-currents e^±, f^±, h^± are
//! built from a test current either through the deformed Laplace integral
//! over its spectrum or through the sh/cth Cauchy kernel on the real line;
//! the jump, boundary-average and quasi-periodicity relations are checked
//! numerically. The κ kernel and the ordering-kernel resummation live here
//! as well.

mod current;
mod ordering;

pub use current::{Channel, TestCurrent};
pub use ordering::{
    direct_convolution, ordering_kernel, ConvergenceReport, OrderingGrid, OrderingKind, OrderingMethod,
    OrderingProbe, OrderingValue,
};

use crate::error::{QalgError, Result};
use crate::hyp::{cth, sh, th};
use crate::quad::adaptive;
use crate::rmatrix::{AlgebraParams, Sign};
use crate::{C64, I};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Laplace,
    Cauchy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfCurrentValue {
    pub value: C64,
    pub u: C64,
    pub sign: Sign,
    pub method: Method,
}

/// Default distance kept between kernel singularities and the real line.
pub fn default_margin(p: &AlgebraParams) -> f64 {
    1e-3 / p.eta
}

/// ε sequence for the boundary-value extrapolations.
pub fn default_eps_seq(p: &AlgebraParams) -> Vec<f64> {
    (0..5).map(|k| 0.1 / p.eta / (1u32 << k) as f64).collect()
}

/// Open interval of Im u on which the half-current of the given channel
/// and sign is defined by its Laplace integral.
pub fn strip(channel: Channel, sign: Sign, p: &AlgebraParams) -> Result<(f64, f64)> {
    let q = p.c * p.hbar / 4.0;
    let s = match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
        Sign::Bare => return Err(QalgError::Params("half-currents carry a sign + or -".into())),
    };
    let (lo, hi) = match channel {
        Channel::E | Channel::H => (-1.0 / p.eta - q, -q),
        Channel::F => (q - 1.0 / p.eta_prime, q),
    };
    if s > 0.0 {
        Ok((lo, hi))
    } else {
        Ok((-hi, -lo))
    }
}

fn check_strip(channel: Channel, sign: Sign, u: C64, p: &AlgebraParams) -> Result<()> {
    let (lo, hi) = strip(channel, sign, p)?;
    if u.im > lo && u.im < hi {
        Ok(())
    } else {
        Err(QalgError::StripViolation(format!("Im u = {} not in ({lo}, {hi})", u.im)))
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Integral over ℝ of a decaying integrand; the extent is found by walking
/// outwards until |f| drops below 1e-17 of its peak.
pub(crate) fn real_line<F: Fn(f64) -> C64>(f: &F, lower: Option<f64>, breaks: &[f64], what: &str) -> Result<C64> {
    let centre = lower.unwrap_or(0.0);
    let mut peak: f64 = 0.0;
    for k in -40..=40 {
        let x = centre + 0.25 * k as f64;
        if lower.map_or(true, |a| x > a) {
            peak = peak.max(f(x).norm());
        }
    }
    for &b in breaks {
        peak = peak.max(f(b).norm());
    }
    if !peak.is_finite() {
        return Err(QalgError::NonDecaying(format!("{what}: integrand is not finite")));
    }
    if peak == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let cut = 1e-17 * peak;
    let edge = |dir: f64, from: f64| -> Result<f64> {
        let mut x = 1.0;
        let mut quiet = 0;
        loop {
            let y = from + dir * x;
            let v = f(y).norm();
            if !v.is_finite() {
                return Err(QalgError::NonDecaying(format!("{what}: overflow at {y}")));
            }
            if v < cut {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(y);
                }
            } else {
                quiet = 0;
            }
            x = 1.15 * x + 0.25;
            if x > 1e4 {
                return Err(QalgError::NonDecaying(format!("{what}: no decay within |x| < 1e4")));
            }
        }
    };
    let bmax = breaks.iter().cloned().fold(centre, f64::max);
    let bmin = breaks.iter().cloned().fold(centre, f64::min);
    let hi = edge(1.0, bmax)?;
    let lo = match lower {
        Some(a) => a,
        None => edge(-1.0, bmin)?,
    };
    let mut pts: Vec<f64> = breaks.to_vec();
    let n = 64;
    for k in 1..n {
        pts.push(lo + (hi - lo) * k as f64 / n as f64);
    }
    let r = adaptive(f, lo, hi, &pts, 1e-16 * peak, 1e-13, 40_000);
    let tol = 1e-12 * peak * (hi - lo);
    if !r.converged && r.err > tol {
        return Err(QalgError::NonConvergence { what: what.to_string(), est: r.err, tol });
    }
    Ok(r.value)
}

fn sign_value(sign: Sign) -> Result<f64> {
    match sign {
        Sign::Plus => Ok(1.0),
        Sign::Minus => Ok(-1.0),
        Sign::Bare => Err(QalgError::Params("half-currents carry a sign + or -".into())),
    }
}

/// Deformed Laplace representation of a half-current.
pub fn laplace_half_current(cur: &TestCurrent, u: C64, sign: Sign, p: &AlgebraParams) -> Result<HalfCurrentValue> {
    let s = sign_value(sign)?;
    check_strip(cur.channel, sign, u, p)?;
    let out = |value| Ok(HalfCurrentValue { value, u, sign, method: Method::Laplace });
    if cur.is_zero() {
        return out(C64::new(0.0, 0.0));
    }
    cur.validate()?;
    let q = p.c * p.hbar / 4.0;
    let value = match cur.channel {
        Channel::E | Channel::F => {
            let (eta, cs) = match cur.channel {
                Channel::E => (p.eta, -s * q),
                _ => (p.eta_prime, s * q),
            };
            let pref = s * (PI * eta * p.hbar).sin() / (PI * eta);
            let f = |l: f64| {
                let a = -l * u.im + cs * l - softplus(s * l / eta);
                cur.spectrum(l) * C64::from_polar(a.exp(), l * u.re)
            };
            pref * real_line(&f, None, &[0.0], "laplace half-current")?
        }
        Channel::H if p.c != 0.0 => {
            let pref = -(PI * p.eta * p.hbar).sin() / (2.0 * PI * p.eta);
            let f = |l: f64| {
                let a = -l * u.im - s * l / (2.0 * p.eta_dprime);
                cur.spectrum(l) * C64::from_polar(a.exp(), l * u.re)
            };
            pref * real_line(&f, None, &[0.0], "laplace h")?
        }
        Channel::H => {
            // c = 0 form, S_0 taken to be zero; ĥ_0 must vanish
            let pref = s * (PI * p.eta * p.hbar).sin() / (PI * p.eta);
            let f = |l: f64| {
                if l == 0.0 {
                    return C64::new(0.0, 0.0);
                }
                let x = s * l / p.eta;
                let w = if x > 0.0 {
                    -(-l * u.im - x).exp() / (-(-x).exp_m1())
                } else {
                    (-l * u.im).exp() / (-x.exp_m1())
                };
                cur.spectrum(l) * C64::from_polar(w, l * u.re)
            };
            if cur.spectrum(0.0).norm() > 1e-14 {
                return Err(QalgError::Precondition("c = 0 h channel needs a current with zero mean".into()));
            }
            pref * real_line(&f, None, &[0.0], "laplace h0")?
        }
    };
    out(value)
}

// distance of Im w from the pole lattice (1/η)ℤ of 1/sh πη(w − v)
fn lattice_distance(w: C64, eta: f64) -> f64 {
    let t = w.im * eta;
    (t - t.round()).abs() / eta
}

// (1/2πi) ∫ E(v) dv / sh πη(w − v)
fn sh_cauchy(cur: &TestCurrent, w: C64, eta: f64, margin: f64) -> Result<C64> {
    let d = lattice_distance(w, eta);
    if d < margin {
        return Err(QalgError::StripViolation(format!(
            "kernel pole within {d:e} of the real line (margin {margin:e})"
        )));
    }
    let f = |v: f64| cur.value(v) / sh(C64::new(PI * eta, 0.0) * (w - v));
    let x = w.re;
    let br = [x - 16.0 * d, x - 4.0 * d, x - d, x, x + d, x + 4.0 * d, x + 16.0 * d];
    Ok(real_line(&f, None, &br, "cauchy half-current")? / (2.0 * PI * I))
}

/// Cauchy-kernel representation of a half-current. The h channel is only
/// available at c = 0, through the cth kernel with S_0 = 0.
pub fn cauchy_half_current(cur: &TestCurrent, u: C64, sign: Sign, p: &AlgebraParams) -> Result<HalfCurrentValue> {
    cauchy_half_current_with_margin(cur, u, sign, p, default_margin(p))
}

pub fn cauchy_half_current_with_margin(
    cur: &TestCurrent,
    u: C64,
    sign: Sign,
    p: &AlgebraParams,
    margin: f64,
) -> Result<HalfCurrentValue> {
    let s = sign_value(sign)?;
    check_strip(cur.channel, sign, u, p)?;
    let out = |value| Ok(HalfCurrentValue { value, u, sign, method: Method::Cauchy });
    if cur.is_zero() {
        return out(C64::new(0.0, 0.0));
    }
    cur.validate()?;
    let q = C64::new(0.0, p.c * p.hbar / 4.0);
    let value = match cur.channel {
        Channel::E => (PI * p.eta * p.hbar).sin() * sh_cauchy(cur, u + q * s, p.eta, margin)?,
        Channel::F => (PI * p.eta_prime * p.hbar).sin() * sh_cauchy(cur, u - q * s, p.eta_prime, margin)?,
        Channel::H => {
            if p.c != 0.0 {
                return Err(QalgError::Precondition("cth-kernel h presentation needs c = 0".into()));
            }
            let d = lattice_distance(u, p.eta);
            if d < margin {
                return Err(QalgError::StripViolation(format!("u within {d:e} of a kernel pole")));
            }
            let f = |v: f64| cur.value(v) * cth(C64::new(PI * p.eta, 0.0) * (v - u));
            let x = u.re;
            let br = [x - 4.0 * d, x - d, x, x + d, x + 4.0 * d];
            C64::new(0.0, (PI * p.eta * p.hbar).sin()) / (2.0 * PI) * real_line(&f, None, &br, "cauchy h0")?
        }
    };
    out(value)
}

/// Half-current by either representation.
pub fn half_current(cur: &TestCurrent, u: C64, sign: Sign, p: &AlgebraParams, method: Method) -> Result<C64> {
    Ok(match method {
        Method::Laplace => laplace_half_current(cur, u, sign, p)?.value,
        Method::Cauchy => cauchy_half_current(cur, u, sign, p)?.value,
    })
}

/// Polynomial extrapolation of samples d(ε_i) to ε = 0. Returns the
/// estimate and the change from dropping the largest ε.
pub fn extrapolate_to_zero(eps: &[f64], d: &[C64]) -> (C64, f64) {
    let neville = |xs: &[f64], ys: &[C64]| -> C64 {
        let mut t = ys.to_vec();
        let n = xs.len();
        for k in 1..n {
            for i in (k..n).rev() {
                t[i] = (t[i] * xs[i - k] - t[i - 1] * xs[i]) / (xs[i - k] - xs[i]);
            }
        }
        t[n - 1]
    };
    let full = neville(eps, d);
    let est = if eps.len() > 2 { (full - neville(&eps[1..], &d[1..])).norm() } else { f64::INFINITY };
    (full, est)
}

fn check_eps(eps: &[f64], p: &AlgebraParams) -> Result<()> {
    let m = default_margin(p);
    if eps.len() < 2 || eps.windows(2).any(|w| !(w[1] < w[0])) || eps.iter().any(|&e| e < m) {
        return Err(QalgError::Params(format!("eps_seq must be strictly decreasing and >= {m:e}")));
    }
    Ok(())
}

fn extrapolated(eps: &[f64], d: &[C64], what: &str) -> Result<f64> {
    let (v, est) = extrapolate_to_zero(eps, d);
    if est > 1e-3 {
        return Err(QalgError::NonConvergence { what: what.into(), est, tol: 1e-3 });
    }
    Ok(v.norm())
}

// (η, sin πηℏ, shift of the boundary) for the e and f channels
fn channel_data(ch: Channel, p: &AlgebraParams) -> Result<(f64, f64, f64)> {
    let q = p.c * p.hbar / 4.0;
    match ch {
        Channel::E => Ok((p.eta, (PI * p.eta * p.hbar).sin(), -q)),
        Channel::F => Ok((p.eta_prime, (PI * p.eta_prime * p.hbar).sin(), q)),
        Channel::H => Err(QalgError::Precondition("jump relations are for the e and f channels".into())),
    }
}

/// Jump across the real line:
/// x^+(ũ + iσ − iε) − x^−(ũ − iσ + iε) − (sin πηℏ/πη) X(ũ), ε → 0,
/// with σ = −cℏ/4 for e and +cℏ/4 for f (η → η′ for f).
pub fn ding_frenkel_residual(cur: &TestCurrent, u_real: f64, p: &AlgebraParams, eps_seq: &[f64]) -> Result<f64> {
    check_eps(eps_seq, p)?;
    let (eta, s, sig) = channel_data(cur.channel, p)?;
    let target = cur.value(u_real) * (s / (PI * eta));
    let mut d = Vec::new();
    for &e in eps_seq {
        let up = cauchy_half_current(cur, C64::new(u_real, sig - e), Sign::Plus, p)?.value;
        let dn = cauchy_half_current(cur, C64::new(u_real, -sig + e), Sign::Minus, p)?.value;
        d.push(up - dn - target);
    }
    extrapolated(eps_seq, &d, "ding-frenkel extrapolation")
}

/// Boundary values of x^+ at the two edges of its strip. Returns the
/// residuals of (sum = jump term, difference = principal-value transform).
pub fn plemelj_average_residuals(cur: &TestCurrent, u_real: f64, p: &AlgebraParams, eps_seq: &[f64]) -> Result<(f64, f64)> {
    check_eps(eps_seq, p)?;
    let (eta, s, sig) = channel_data(cur.channel, p)?;
    let jump = cur.value(u_real) * (s / (PI * eta));
    let pv = principal_value_sh(cur, u_real, eta)?;
    let pv_term = I * (s / PI) * pv;
    let mut ds = Vec::new();
    let mut dd = Vec::new();
    for &e in eps_seq {
        let top = cauchy_half_current(cur, C64::new(u_real, sig - e), Sign::Plus, p)?.value;
        let bot = cauchy_half_current(cur, C64::new(u_real, sig - 1.0 / eta + e), Sign::Plus, p)?.value;
        ds.push(top + bot - jump);
        dd.push(top - bot - pv_term);
    }
    Ok((extrapolated(eps_seq, &ds, "Plemelj sum")?, extrapolated(eps_seq, &dd, "Plemelj difference")?))
}

/// PV ∫ X(v) dv / sh πη(v − ũ), folded onto (0, ∞).
pub fn principal_value_sh(cur: &TestCurrent, u_real: f64, eta: f64) -> Result<C64> {
    let f = |t: f64| (cur.value(u_real + t) - cur.value(u_real - t)) / (PI * eta * t).sinh();
    real_line(&f, Some(0.0), &[], "principal value")
}

/// |x^−(u) − σ x^+(u − i/η″)| from the Laplace forms; σ = −1 for e and f,
/// +1 for h.
pub fn quasiperiodicity_residual(cur: &TestCurrent, u: C64, p: &AlgebraParams) -> Result<f64> {
    let left = laplace_half_current(cur, u, Sign::Minus, p)?.value;
    let shifted = u - I / p.eta_dprime;
    let right = laplace_half_current(cur, shifted, Sign::Plus, p)?.value;
    let sigma = if cur.channel == Channel::H { 1.0 } else { -1.0 };
    Ok((left - right * sigma).norm())
}

/// Cauchy-Riemann residual |∂_y x − i ∂_x x| / |∂_x x| on a 4th-order
/// stencil of step h.
pub fn analyticity_residual(cur: &TestCurrent, u: C64, sign: Sign, p: &AlgebraParams, method: Method, h: f64) -> Result<f64> {
    let g = |z: C64| half_current(cur, z, sign, p, method);
    let d = |dir: C64| -> Result<C64> {
        let a = g(u + dir * (2.0 * h))?;
        let b = g(u + dir * h)?;
        let c = g(u - dir * h)?;
        let e = g(u - dir * (2.0 * h))?;
        Ok((-a + b * 8.0 - c * 8.0 + e) / (12.0 * h))
    };
    let dx = d(C64::new(1.0, 0.0))?;
    let dy = d(I)?;
    Ok((dy - I * dx).norm() / dx.norm().max(1e-300))
}

/// The function under the κ Fourier integral, written with th so that it
/// stays bounded on ℝ. Purely imaginary and odd in u.
pub fn kappa_symbol(u: f64, p: &AlgebraParams) -> C64 {
    let a = (PI * p.eta * p.hbar).tan();
    let b = (PI * p.eta_prime * p.hbar).tan();
    let t = th(C64::new(PI * p.eta * u, 0.0));
    let tp = th(C64::new(PI * p.eta_prime * u, 0.0));
    (t * I * b - tp * I * a) / (tp * t + a * b)
}

/// κ(τ) with its imaginary part, which vanishes analytically.
pub fn kappa_kernel_complex(tau: f64, p: &AlgebraParams) -> Result<C64> {
    if !(p.hbar * p.c > 0.0) {
        return Err(QalgError::Precondition("κ(τ) needs ℏc > 0".into()));
    }
    if tau == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    // subtract the constant limit through th u, whose transform is known
    let kinf = (PI * p.hbar * (p.eta_prime - p.eta)).tan();
    let f = |u: f64| (kappa_symbol(u, p) - I * kinf * u.tanh()) * C64::from_polar(1.0, -tau * u);
    let rate = (2.0 * PI * p.eta).min(2.0 * PI * p.eta_prime).min(2.0);
    let ext = 40.0 / rate;
    let mut br: Vec<f64> = (-32..=32).map(|k| ext * k as f64 / 32.0).collect();
    br.retain(|x| x.abs() < ext);
    let r = adaptive(&f, -ext, ext, &br, 1e-16, 1e-14, 20_000);
    if !r.converged && r.err > 1e-12 {
        return Err(QalgError::NonConvergence { what: "kappa".into(), est: r.err, tol: 1e-12 });
    }
    Ok(kinf / (2.0 * (PI * tau / 2.0).sinh()) + r.value / (2.0 * PI))
}

pub fn kappa_kernel(tau: f64, p: &AlgebraParams) -> Result<f64> {
    Ok(kappa_kernel_complex(tau, p)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c: f64) -> AlgebraParams {
        AlgebraParams::new(0.3, 0.7, c).unwrap()
    }

    fn mid(ch: Channel, sign: Sign, p: &AlgebraParams) -> f64 {
        let (a, b) = strip(ch, sign, p).unwrap();
        0.5 * (a + b)
    }

    #[test]
    fn laplace_and_cauchy_agree() {
        for c in [0.0, 1.0] {
            let p = params(c);
            for ch in [Channel::E, Channel::F] {
                for cur in [TestCurrent::gaussian(ch), TestCurrent::sech(p.eta, ch)] {
                    for sign in [Sign::Plus, Sign::Minus] {
                        for &x in &[-0.7, 0.2, 1.1] {
                            let u = C64::new(x, mid(ch, sign, &p) + 0.15);
                            let a = laplace_half_current(&cur, u, sign, &p).unwrap().value;
                            let b = cauchy_half_current(&cur, u, sign, &p).unwrap().value;
                            assert!((a - b).norm() < 1e-8, "{} {ch:?} {sign:?} c={c}: {a} vs {b}", cur.name);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn h_channel_at_level_zero_matches_cth_form() {
        let p = params(0.0);
        let cur = TestCurrent::odd_gaussian(Channel::H);
        for sign in [Sign::Plus, Sign::Minus] {
            let u = C64::new(0.4, mid(Channel::H, sign, &p));
            let a = laplace_half_current(&cur, u, sign, &p).unwrap().value;
            let b = cauchy_half_current(&cur, u, sign, &p).unwrap().value;
            assert!((a - b).norm() < 1e-8, "{sign:?}: {a} vs {b}");
        }
    }

    #[test]
    fn strip_and_precondition_errors() {
        let p = params(1.0);
        let g = TestCurrent::gaussian(Channel::E);
        let out = C64::new(0.0, 0.5);
        assert!(matches!(laplace_half_current(&g, out, Sign::Plus, &p), Err(QalgError::StripViolation(_))));
        let r = TestCurrent::rational(Channel::E);
        let u = C64::new(0.0, mid(Channel::E, Sign::Plus, &p));
        assert!(matches!(laplace_half_current(&r, u, Sign::Plus, &p), Err(QalgError::Precondition(_))));
        let z = TestCurrent::zero(Channel::E);
        assert_eq!(laplace_half_current(&z, u, Sign::Plus, &p).unwrap().value, C64::new(0.0, 0.0));
        assert_eq!(cauchy_half_current(&z, u, Sign::Plus, &p).unwrap().value, C64::new(0.0, 0.0));
    }

    #[test]
    fn jump_and_average_relations() {
        let p = params(1.0);
        let eps = default_eps_seq(&p);
        for ch in [Channel::E, Channel::F] {
            for cur in [TestCurrent::gaussian(ch), TestCurrent::sech(p.eta, ch)] {
                let r = ding_frenkel_residual(&cur, 0.5, &p, &eps).unwrap();
                assert!(r < 1e-6, "jump {} {ch:?}: {r}", cur.name);
                let (s, d) = plemelj_average_residuals(&cur, 0.5, &p, &eps).unwrap();
                assert!(s < 1e-6 && d < 1e-6, "plemelj average {} {ch:?}: {s} {d}", cur.name);
            }
        }
        let z = TestCurrent::zero(Channel::E);
        assert_eq!(ding_frenkel_residual(&z, 0.5, &p, &eps).unwrap(), 0.0);
    }

    #[test]
    fn quasi_periodicity_all_channels() {
        for c in [0.0, 1.0] {
            let p = params(c);
            for ch in [Channel::E, Channel::F, Channel::H] {
                let cur = if ch == Channel::H { TestCurrent::odd_gaussian(ch) } else { TestCurrent::gaussian(ch) };
                let u = C64::new(0.3, mid(ch, Sign::Minus, &p));
                let r = quasiperiodicity_residual(&cur, u, &p).unwrap();
                assert!(r < 1e-7, "{ch:?} c={c}: {r}");
            }
        }
    }

    #[test]
    fn half_currents_are_analytic() {
        let p = params(1.0);
        let cur = TestCurrent::sech(p.eta, Channel::E);
        let u = C64::new(0.2, mid(Channel::E, Sign::Plus, &p));
        for m in [Method::Laplace, Method::Cauchy] {
            let r = analyticity_residual(&cur, u, Sign::Plus, &p, m, 1e-2).unwrap();
            assert!(r < 1e-6, "{m:?}: {r}");
        }
    }

    #[test]
    fn kappa_is_real_and_odd() {
        let p = params(1.0);
        assert_eq!(kappa_kernel(0.0, &p).unwrap(), 0.0);
        for &t in &[0.5, 1.0, 2.0] {
            let k = kappa_kernel_complex(t, &p).unwrap();
            let km = kappa_kernel_complex(-t, &p).unwrap();
            assert!(k.im.abs() < 1e-10);
            assert!((k + km).norm() < 1e-10);
        }
        assert!(kappa_kernel(1.0, &params(0.0)).is_err());
    }

    #[test]
    fn kappa_against_plain_quadrature() {
        // direct truncated transform without the th subtraction, with a
        // smooth cutoff large enough that the 1/τ tail is resolved
        let p = params(1.0);
        let tau = 1.3;
        let f = |u: f64| kappa_symbol(u, &p) * C64::from_polar(1.0, -tau * u) * (-(u / 60.0).powi(8)).exp();
        let br: Vec<f64> = (-200..=200).map(|k| 0.5 * k as f64).collect();
        let r = adaptive(&f, -150.0, 150.0, &br, 1e-14, 1e-12, 50_000);
        let k = kappa_kernel(tau, &p).unwrap();
        assert!((r.value.re / (2.0 * PI) - k).abs() < 1e-6, "{} vs {k}", r.value.re / (2.0 * PI));
    }
}
