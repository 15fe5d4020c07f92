//! Finite-dimensional U_q(sl2) modules, the c = 0 evaluation map, L-operators
//! on V_n with their Gauss decomposition, the quantum determinant, RLL and
//! coproduct residuals, and the degenerate Sklyanin relations.
//!
//! Weight convention: h v_k = (n − 2k) v_k, so that e (which lowers k)
//! raises the weight and [e, f] = [h]_η holds on the nose.

use crate::error::{QalgError, Result};
use crate::hyp::{cth, sh};
use crate::mat::{anticommutator, commutator, diag, eye, kron, rel_diff, zeros, CMat};
use crate::rmatrix::{r_full, r_scalar, tau, AlgebraParams, Sign};
use crate::{NamedResidual, C64, I};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct UqSl2Module {
    pub n: usize,
    pub h_mat: CMat,
    pub e_mat: CMat,
    pub f_mat: CMat,
    pub params: AlgebraParams,
}

impl UqSl2Module {
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// weight of v_k
    pub fn weight(&self, k: usize) -> f64 {
        self.n as f64 - 2.0 * k as f64
    }

    /// g(h) as a diagonal matrix.
    pub fn fn_of_h<F: Fn(f64) -> C64>(&self, g: F) -> CMat {
        let d: Vec<C64> = (0..self.dim()).map(|k| g(self.weight(k))).collect();
        diag(&d)
    }

    /// [p]_η = sin(πηℏp)/sin(πηℏ)
    pub fn qnum(&self, p: f64) -> f64 {
        let t = self.params.theta();
        (t * p).sin() / t.sin()
    }
}

pub fn build_module(n: usize, params: &AlgebraParams) -> Result<UqSl2Module> {
    let t = params.theta();
    if t.sin().abs() < 1e-12 {
        return Err(QalgError::DegenerateQ);
    }
    let d = n + 1;
    let q = |p: f64| C64::new((t * p).sin() / t.sin(), 0.0);
    let mut e = zeros(d, d);
    let mut f = zeros(d, d);
    for k in 0..d {
        if k >= 1 {
            e[(k - 1, k)] = q(k as f64);
        }
        if k + 1 < d {
            f[(k + 1, k)] = q((n - k) as f64);
        }
    }
    let h = diag(&(0..d).map(|k| C64::new(n as f64 - 2.0 * k as f64, 0.0)).collect::<Vec<_>>());
    Ok(UqSl2Module { n, h_mat: h, e_mat: e, f_mat: f, params: *params })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    EPlus,
    FPlus,
    HPlus,
    EMinus,
    FMinus,
    HMinus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvImage {
    pub mat: CMat,
    /// false when u − z lies outside the strip of the generator; the value is
    /// then the meromorphic continuation
    pub in_strip: bool,
}

fn check_den(v: C64, what: &str) -> Result<C64> {
    if v.norm() < 1e-12 {
        return Err(QalgError::Pole(format!("{what}: vanishing sh in the evaluation map")));
    }
    Ok(v)
}

/// Ev_z of the generating functions, in the second form of the evaluation map.
pub fn ev_generator(which: Generator, u: C64, z: C64, m: &UqSl2Module) -> Result<EvImage> {
    let p = &m.params;
    let x = u - z;
    let th = p.theta();
    let shq = sh(I * th);
    let s = |a: f64| sh(PI * p.eta * (x + I * p.hbar * a));
    let plus = matches!(which, Generator::EPlus | Generator::FPlus | Generator::HPlus);
    let im = x.im;
    let in_strip = if plus { im > -1.0 / p.eta && im < 0.0 } else { im > 0.0 && im < 1.0 / p.eta };
    let mut left_m = Vec::with_capacity(m.dim());
    let mut left_p = Vec::with_capacity(m.dim());
    for k in 0..m.dim() {
        let w = m.weight(k);
        left_m.push(check_den(s((w - 1.0) / 2.0), "ev")?);
        left_p.push(check_den(s((w + 1.0) / 2.0), "ev")?);
    }
    let mat = match which {
        Generator::EPlus | Generator::EMinus => {
            let d = diag(&left_m.iter().map(|v| -shq / v).collect::<Vec<_>>());
            d * &m.e_mat
        }
        Generator::FPlus | Generator::FMinus => {
            let d = diag(&left_p.iter().map(|v| -shq / v).collect::<Vec<_>>());
            d * &m.f_mat
        }
        Generator::HPlus | Generator::HMinus => {
            let ef = &m.e_mat * &m.f_mat;
            let fe = &m.f_mat * &m.e_mat;
            let ctm = m.fn_of_h(|w| cth(PI * p.eta * (x + I * p.hbar * (w - 1.0) / 2.0)));
            let ctp = m.fn_of_h(|w| cth(PI * p.eta * (x + I * p.hbar * (w + 1.0) / 2.0)));
            let cosh_part = m.fn_of_h(|w| C64::new((th * w).cos(), 0.0));
            cosh_part - (ctm * ef - ctp * fe) * shq
        }
    };
    Ok(EvImage { mat, in_strip })
}

/// Closed form of π_n(z) h^+(u) as a diagonal matrix.
pub fn h_plus_closed_form(u: C64, z: C64, m: &UqSl2Module) -> Result<CMat> {
    let p = &m.params;
    let x = u - z;
    let s = |a: f64| sh(PI * p.eta * (x + I * p.hbar * a));
    let n1 = (m.n as f64 + 1.0) / 2.0;
    let num = s(-n1) * s(n1);
    let mut d = Vec::with_capacity(m.dim());
    for k in 0..m.dim() {
        let w = m.weight(k);
        let den = check_den(s((w + 1.0) / 2.0) * s((w - 1.0) / 2.0), "h+ closed form")?;
        d.push(num / den);
    }
    Ok(diag(&d))
}

/// Ev_z of the Fourier symbols at spectral value λ: (ê_λ, f̂_λ, ĥ_λ).
pub fn ev_symbols(lambda: f64, z: C64, m: &UqSl2Module) -> (CMat, CMat, CMat) {
    let p = &m.params;
    let ph = (-I * lambda * z).exp();
    let em = m.fn_of_h(|w| C64::new((-p.hbar * lambda * (w - 1.0) / 2.0).exp(), 0.0));
    let ep = m.fn_of_h(|w| C64::new((-p.hbar * lambda * (w + 1.0) / 2.0).exp(), 0.0));
    let e = &em * &m.e_mat * ph;
    let f = &ep * &m.f_mat * ph;
    let h = (&em * &m.e_mat * &m.f_mat - &ep * &m.f_mat * &m.e_mat) * ph;
    (e, f, h)
}

/// Ev image of S₀.
pub fn ev_s0(m: &UqSl2Module) -> CMat {
    let t = m.params.theta();
    m.fn_of_h(|w| C64::new((t * w).cos(), 0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LOperatorRep {
    /// blocks[a][b] = L_{ab}, with index 0 for + and 1 for −
    pub blocks: [[CMat; 2]; 2],
    pub u: C64,
    pub sign: Sign,
    pub z: C64,
}

impl LOperatorRep {
    pub fn dim(&self) -> usize {
        self.blocks[0][0].nrows()
    }

    /// Full matrix on C² ⊗ V with the auxiliary space first.
    pub fn to_full(&self) -> CMat {
        let d = self.dim();
        let mut m = zeros(2 * d, 2 * d);
        for a in 0..2 {
            for b in 0..2 {
                m.view_mut((a * d, b * d), (d, d)).copy_from(&self.blocks[a][b]);
            }
        }
        m
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        for a in 0..2 {
            for b in 0..2 {
                out.blocks[a][b] = &self.blocks[a][b] * s;
            }
        }
        out
    }

    /// σz L σz on the auxiliary space.
    pub fn aux_sigma_conjugate(&self) -> Self {
        let mut out = self.clone();
        out.blocks[0][1] = -&self.blocks[0][1];
        out.blocks[1][0] = -&self.blocks[1][0];
        out
    }
}

/// π₁(z) L^±(u) = R^±(u − z) reshaped with the auxiliary space first.
pub fn pi1_l(z: C64, u: C64, sign: Sign, params: &AlgebraParams, trunc: usize) -> Result<LOperatorRep> {
    let r = r_full(u - z, sign, params, trunc)?.entries;
    Ok(reshape_r(&r, u, sign, z))
}

fn reshape_r(r: &CMat, u: C64, sign: Sign, z: C64) -> LOperatorRep {
    let mut blocks = [[zeros(2, 2), zeros(2, 2)], [zeros(2, 2), zeros(2, 2)]];
    for a in 0..2 {
        for b in 0..2 {
            for cc in 0..2 {
                for d in 0..2 {
                    blocks[a][b][(cc, d)] = r[(2 * a + cc, 2 * b + d)];
                }
            }
        }
    }
    LOperatorRep { blocks, u, sign, z }
}

/// Same reshape for R̄ alone (no scalar prefactor).
pub fn pi1_l_bare(z: C64, u: C64, params: &AlgebraParams) -> Result<LOperatorRep> {
    let r = crate::rmatrix::rbar(u - z, params)?;
    Ok(reshape_r(&r, u, Sign::Bare, z))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussCoords {
    pub e_coord: CMat,
    pub f_coord: CMat,
    pub k1: CMat,
    pub k2: CMat,
    pub h_coord: CMat,
    pub h_tilde: CMat,
}

pub fn gauss_decompose(l: &LOperatorRep, params: &AlgebraParams) -> Result<GaussCoords> {
    let k2 = l.blocks[1][1].clone();
    let k2i = k2
        .clone()
        .try_inverse()
        .ok_or_else(|| QalgError::Singular("L_{--} is not invertible".into()))?;
    if !crate::mat::is_finite(&k2i) || crate::mat::max_abs(&k2i) > 1e14 * crate::mat::max_abs(&k2).max(1e-300).recip() {
        return Err(QalgError::Singular("L_{--} is numerically singular".into()));
    }
    let e = &k2i * &l.blocks[1][0];
    let f = &l.blocks[0][1] * &k2i;
    let k1 = &l.blocks[0][0] - &f * &k2 * &e;
    let h = &k2i * &k1;
    let (ep, e0) = (params.eta_prime, params.eta);
    let ratio = (e0 / ep) * (PI * ep * params.hbar).sin() / (PI * e0 * params.hbar).sin();
    let h_tilde = &h * C64::new(ratio, 0.0);
    Ok(GaussCoords { e_coord: e, f_coord: f, k1, k2, h_coord: h, h_tilde })
}

/// (1 f; 0 1)(k1 0; 0 k2)(1 0; e 1) as an L-operator.
pub fn reassemble(g: &GaussCoords, u: C64, sign: Sign, z: C64) -> LOperatorRep {
    let fk2 = &g.f_coord * &g.k2;
    let blocks = [[&g.k1 + &fk2 * &g.e_coord, fk2], [&g.k2 * &g.e_coord, g.k2.clone()]];
    LOperatorRep { blocks, u, sign, z }
}

/// π_n(z) L^±(u) assembled from the evaluation images of the Gauss
/// coordinates; for n = 1 this reproduces `pi1_l`.
pub fn pin_l(n: usize, z: C64, u: C64, sign: Sign, params: &AlgebraParams, trunc: usize) -> Result<LOperatorRep> {
    let m = build_module(n, params)?;
    pin_l_in(&m, z, u, sign, trunc, true)
}

fn pin_l_in(m: &UqSl2Module, z: C64, u: C64, sign: Sign, trunc: usize, with_scalar: bool) -> Result<LOperatorRep> {
    let p = &m.params;
    let (ge, gf, gh) = match sign {
        Sign::Minus => (Generator::EMinus, Generator::FMinus, Generator::HMinus),
        _ => (Generator::EPlus, Generator::FPlus, Generator::HPlus),
    };
    let e = ev_generator(ge, u, z, m)?.mat;
    let f = ev_generator(gf, u, z, m)?.mat;
    let h = ev_generator(gh, u, z, m)?.mat;
    let x = u - z;
    let s = |a: f64| sh(PI * p.eta * (x + I * p.hbar * a));
    let n1 = (m.n as f64 + 1.0) / 2.0;
    let den = check_den(s(-n1), "k2 normalization")?;
    let k2 = m.fn_of_h(|w| s((w - 1.0) / 2.0) / den);
    let k1 = &k2 * &h;
    let g = GaussCoords { e_coord: e, f_coord: f, k1, k2, h_coord: h.clone(), h_tilde: h };
    let l = reassemble(&g, u, sign, z);
    if !with_scalar {
        return Ok(l);
    }
    let sc = tau(x, sign, p)? * r_scalar(x, p, trunc)?;
    Ok(l.scaled(sc))
}

/// Quantum determinant L_{++}(u−iℏ)L_{−−}(u) − L_{+−}(u−iℏ)L_{−+}(u).
pub fn qdet<F: Fn(C64) -> Result<LOperatorRep>>(builder: F, u: C64, hbar: f64) -> Result<CMat> {
    let a = builder(u - I * hbar)?;
    let b = builder(u)?;
    Ok(&a.blocks[0][0] * &b.blocks[1][1] - &a.blocks[0][1] * &b.blocks[1][0])
}

/// Mean diagonal value of a matrix expected to be a multiple of identity.
pub fn scalar_part(m: &CMat) -> C64 {
    let n = m.nrows();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        s += m[(i, i)];
    }
    s / n as f64
}

fn embed_first(l: &LOperatorRep) -> CMat {
    // Σ E_ab ⊗ I₂ ⊗ L_ab
    let d = l.dim();
    let mut m = zeros(4 * d, 4 * d);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let row = (2 * a + c) * d;
                let col = (2 * b + c) * d;
                m.view_mut((row, col), (d, d)).copy_from(&l.blocks[a][b]);
            }
        }
    }
    m
}

fn embed_second(l: &LOperatorRep) -> CMat {
    kron(&eye(2), &l.to_full())
}

/// Normalized ‖R L₁ L₂ − L₂ L₁ R‖_max for two L-operators on the same
/// quantum space, with R on the two auxiliary factors.
pub fn rll_residual_for(r: &CMat, l1: &LOperatorRep, l2: &LOperatorRep) -> f64 {
    let d = l1.dim();
    let rr = kron(r, &eye(d));
    let a = embed_first(l1);
    let b = embed_second(l2);
    let lhs = &rr * &a * &b;
    let rhs = &b * &a * &rr;
    rel_diff(&lhs, &rhs)
}

/// RLL residual at c = 0 on V_n. The overall scalar of R cancels in the
/// normalized residual, so R = r R̄ is used for every sign pair.
pub fn rll_residual(
    n: usize,
    z1: C64,
    u1: C64,
    u2: C64,
    signs: (Sign, Sign),
    params: &AlgebraParams,
    trunc: usize,
) -> Result<f64> {
    let p = params.at_level_zero();
    let build = |u: C64, s: Sign| -> Result<LOperatorRep> {
        if n == 1 {
            pi1_l(z1, u, s, &p, trunc)
        } else {
            pin_l(n, z1, u, s, &p, trunc)
        }
    };
    let l1 = build(u1, signs.0)?;
    let l2 = build(u2, signs.1)?;
    let r = r_full(u1 - u2, Sign::Bare, &p, trunc)?.entries;
    Ok(rll_residual_for(&r, &l1, &l2))
}

/// ‖L⁺(u − i/η″) − σz L⁻(u) σz‖_max relative, on V_n.
pub fn loperator_shift_residual_n(n: usize, u: C64, z: C64, params: &AlgebraParams, trunc: usize) -> Result<f64> {
    let p = params.at_level_zero();
    let build = |u: C64, s: Sign| if n == 1 { pi1_l(z, u, s, &p, trunc) } else { pin_l(n, z, u, s, &p, trunc) };
    let a = build(u - I / p.eta_dprime, Sign::Plus)?;
    let b = build(u, Sign::Minus)?.aux_sigma_conjugate();
    Ok(rel_diff(&a.to_full(), &b.to_full()))
}

pub fn loperator_shift_residual(u: C64, z: C64, params: &AlgebraParams, trunc: usize) -> Result<f64> {
    loperator_shift_residual_n(1, u, z, params, trunc)
}

/// ΔL_{ij} = Σ_k L_{kj} ⊗ L_{ik}, on V_first ⊗ V_second.
pub fn coproduct(first: &LOperatorRep, second: &LOperatorRep) -> LOperatorRep {
    let mut blocks = [
        [zeros(1, 1), zeros(1, 1)],
        [zeros(1, 1), zeros(1, 1)],
    ];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = kron(&first.blocks[0][j], &second.blocks[i][0]);
            acc += kron(&first.blocks[1][j], &second.blocks[i][1]);
            blocks[i][j] = acc;
        }
    }
    LOperatorRep { blocks, u: first.u, sign: first.sign, z: first.z }
}

/// Coproduct residuals at c = 0 on V_{z1} ⊗ V_{z2} (both two-dimensional):
/// RLL for ΔL, qdet primitivity for inputs normalized to unit qdet, and
/// coassociativity on a triple product.
pub fn coproduct_residuals(
    z1: C64,
    z2: C64,
    u1: C64,
    u2: C64,
    params: &AlgebraParams,
    trunc: usize,
) -> Result<Vec<NamedResidual>> {
    let p = params.at_level_zero();
    let r = r_full(u1 - u2, Sign::Bare, &p, trunc)?.entries;
    let d1 = coproduct(&pi1_l(z1, u1, Sign::Plus, &p, trunc)?, &pi1_l(z2, u1, Sign::Plus, &p, trunc)?);
    let d2 = coproduct(&pi1_l(z1, u2, Sign::Plus, &p, trunc)?, &pi1_l(z2, u2, Sign::Plus, &p, trunc)?);
    let rll = rll_residual_for(&r, &d1, &d2);

    // normalize each factor so that its own qdet is the identity
    let norm = |z: C64| -> Result<C64> {
        let q = qdet(|u| pi1_l(z, u, Sign::Plus, &p, trunc), u1, p.hbar)?;
        Ok(scalar_part(&q).sqrt().inv())
    };
    let (s1, s2) = (norm(z1)?, norm(z2)?);
    let dl = |u: C64| -> Result<LOperatorRep> {
        Ok(coproduct(
            &pi1_l(z1, u, Sign::Plus, &p, trunc)?.scaled(s1),
            &pi1_l(z2, u, Sign::Plus, &p, trunc)?.scaled(s2),
        ))
    };
    let qd = qdet(dl, u1, p.hbar)?;
    let prim = crate::mat::max_abs(&(qd - eye(4)));

    let z3 = z1 + 0.37;
    let a = pi1_l(z1, u1, Sign::Plus, &p, trunc)?;
    let b = pi1_l(z2, u1, Sign::Plus, &p, trunc)?;
    let c = pi1_l(z3, u1, Sign::Plus, &p, trunc)?;
    let left = coproduct(&coproduct(&a, &b), &c);
    let right = coproduct(&a, &coproduct(&b, &c));
    let coass = rel_diff(&left.to_full(), &right.to_full());
    Ok(vec![
        NamedResidual::new("coproduct_rll", rll),
        NamedResidual::new("coproduct_qdet_primitive", prim),
        NamedResidual::new("coproduct_coassociative", coass),
    ])
}

/// The seven displayed Sklyanin relations with the printed coefficients,
/// plus [ê_λ, f̂_μ] = ĥ_{λ+μ} at generic λ, μ. Returns (printed, corrected)
/// where `corrected` flips the sign of the two [S₀, ·] coefficients.
pub fn sklyanin_residuals(n: usize, z: C64, params: &AlgebraParams) -> Result<(Vec<NamedResidual>, Vec<NamedResidual>)> {
    let p = params.at_level_zero();
    let m = build_module(n, &p)?;
    let t = p.theta();
    let (sn, tg) = (t.sin(), t.tan());
    let s0 = ev_s0(&m);
    let (e0, f0, h0) = ev_symbols(0.0, z, &m);
    let id = eye(m.dim());
    let cst = |x: f64| C64::new(x, 0.0);
    let r1 = rel_diff(&commutator(&e0, &f0), &h0);
    let r2 = crate::mat::max_abs(&commutator(&s0, &h0));
    let r3 = rel_diff(&(&s0 * &s0 + &h0 * &h0 * cst(sn * sn)), &id);
    let se = commutator(&s0, &e0);
    let sf = commutator(&s0, &f0);
    let he = anticommutator(&h0, &e0);
    let hf = anticommutator(&h0, &f0);
    let r4 = rel_diff(&se, &(&he * cst(sn * tg)));
    let r5 = rel_diff(&commutator(&h0, &e0), &(anticommutator(&s0, &e0) * cst(tg / sn)));
    let r6 = rel_diff(&sf, &(&hf * cst(-sn * tg)));
    let r7 = rel_diff(&commutator(&h0, &f0), &(anticommutator(&s0, &f0) * cst(-tg / sn)));
    let (lam, mu) = (0.37, -0.81);
    let (el, _, _) = ev_symbols(lam, z, &m);
    let (_, fm, _) = ev_symbols(mu, z, &m);
    let (_, _, hlm) = ev_symbols(lam + mu, z, &m);
    let r8 = rel_diff(&commutator(&el, &fm), &hlm);
    let printed = vec![
        NamedResidual::new("ef_h0", r1),
        NamedResidual::new("s0_h0_commute", r2),
        NamedResidual::new("casimir", r3),
        NamedResidual::new("s0_e0", r4),
        NamedResidual::new("h0_e0", r5),
        NamedResidual::new("s0_f0", r6),
        NamedResidual::new("h0_f0", r7),
        NamedResidual::new("e_lambda_f_mu", r8),
    ];
    let corrected = vec![
        NamedResidual::new("s0_e0_sign_corrected", rel_diff(&se, &(&he * cst(-sn * tg)))),
        NamedResidual::new("s0_f0_sign_corrected", rel_diff(&sf, &(&hf * cst(sn * tg)))),
    ];
    Ok((printed, corrected))
}

/// Residuals of the Gauss-coordinate relations at c = 0 for the evaluation
/// images on V_n at spectral points u1, u2.
pub fn gauss_relation_residuals(n: usize, z: C64, u1: C64, u2: C64, params: &AlgebraParams) -> Result<Vec<NamedResidual>> {
    let p = params.at_level_zero();
    let m = build_module(n, &p)?;
    let ev = |g: Generator, u: C64| ev_generator(g, u, z, &m).map(|x| x.mat);
    let (e1, e2) = (ev(Generator::EPlus, u1)?, ev(Generator::EPlus, u2)?);
    let (f1, f2) = (ev(Generator::FPlus, u1)?, ev(Generator::FPlus, u2)?);
    let (h1, h2) = (ev(Generator::HPlus, u1)?, ev(Generator::HPlus, u2)?);
    let u = u1 - u2;
    let shq = sh(I * p.theta());
    let s = |a: f64| sh(PI * p.eta * (u + I * p.hbar * a));
    let ef = rel_diff(&(&e1 * &f2 - &f2 * &e1), &((&h1 - &h2) * (shq / sh(PI * p.eta * u))));
    let he = rel_diff(&(&h1 * &e2 * s(1.0) - &e2 * &h1 * s(-1.0)), &(anticommutator(&h1, &e1) * shq));
    let hf = rel_diff(&(&h1 * &f2 * s(-1.0) - &f2 * &h1 * s(1.0)), &(anticommutator(&h1, &f1) * (-shq)));
    let ee = rel_diff(&(&e1 * &e2 * s(1.0) - &e2 * &e1 * s(-1.0)), &((&e1 * &e1 + &e2 * &e2) * shq));
    let ff = rel_diff(&(&f1 * &f2 * s(-1.0) - &f2 * &f1 * s(1.0)), &((&f1 * &f1 + &f2 * &f2) * (-shq)));
    let hh = rel_diff(&(&h1 * &h2), &(&h2 * &h1));
    Ok(vec![
        NamedResidual::new("ef", ef),
        NamedResidual::new("he", he),
        NamedResidual::new("hf", hf),
        NamedResidual::new("ee", ee),
        NamedResidual::new("ff", ff),
        NamedResidual::new("hh", hh),
    ])
}
