//! Barnes-type double Gamma in the normalization where the contour integral
//! of the two-period kernel equals ln Γ₂ − (γ/2) B₂₂, and the matching
//! one- and zero-period integrals L1, L0.

use super::gamma::log_gamma;
use super::hankel::{hankel_log_integral, HankelContour, SpecialValue};
use crate::error::{QalgError, Result};
use crate::{C64, EULER_GAMMA};
use std::f64::consts::PI;

/// Double Bernoulli polynomial B₂₂(x | ω1, ω2).
pub fn bernoulli22(x: C64, w1: C64, w2: C64) -> Result<C64> {
    let p = w1 * w2;
    if p.norm() == 0.0 {
        return Err(QalgError::ZeroPeriod);
    }
    Ok((x * x - x * (w1 + w2) + (w1 * w1 + 3.0 * w1 * w2 + w2 * w2) / 6.0) / p)
}

/// L0(x) = ∫ ln(-λ)/(2πiλ) e^{-xλ} dλ = -ln x - γ.
pub fn l0(x: C64) -> C64 {
    -x.ln() - EULER_GAMMA
}

/// L1(x|ω): the contour integral with kernel 1/(1 - e^{-ωλ}).
pub fn l1(x: C64, w: f64) -> Result<C64> {
    if !(w > 0.0) {
        return Err(QalgError::ZeroPeriod);
    }
    let y = x / w;
    Ok(log_gamma(y)? + (y - 0.5) * (EULER_GAMMA + w.ln()) - 0.5 * (2.0 * PI).ln())
}

fn kernel2(w1: f64, w2: f64) -> impl Fn(C64) -> C64 {
    move |l: C64| 1.0 / ((1.0 - (-w1 * l).exp()) * (1.0 - (-w2 * l).exp()))
}

/// L2(x|ω1,ω2) by quadrature when Re x >= min ω, otherwise by the shift
/// L2(x) = L2(x + ω) + L1(x | ω̃) with ω the larger period.
pub fn l2(x: C64, w1: f64, w2: f64) -> Result<SpecialValue> {
    if !(w1 > 0.0 && w2 > 0.0) {
        return Err(QalgError::ZeroPeriod);
    }
    let (big, small) = if w1 >= w2 { (w1, w2) } else { (w2, w1) };
    let mut y = x;
    let mut corr = C64::new(0.0, 0.0);
    let mut steps = 0;
    while y.re < small {
        corr += l1(y, small)?;
        y += big;
        steps += 1;
        if steps > 100_000 {
            return Err(QalgError::Params("L2 shift did not terminate".into()));
        }
    }
    let k = HankelContour::for_periods(&[w1, w2])?.with_truncation((80.0 / small).max(40.0 / y.re));
    let q = hankel_log_integral(&kernel2(w1, w2), y, &k)?;
    Ok(SpecialValue { value: q.value + corr, est_error: q.est_error })
}

/// ln Γ₂(x|ω1,ω2) by direct contour quadrature (Re x > 0).
pub fn log_gamma2(x: C64, w1: f64, w2: f64, contour: &HankelContour) -> Result<SpecialValue> {
    if !(w1 > 0.0 && w2 > 0.0) {
        return Err(QalgError::ZeroPeriod);
    }
    if !(x.re > 0.0) {
        return Err(QalgError::Precondition(format!("log_gamma2 needs Re x > 0, got {x}")));
    }
    let k = contour.with_truncation(contour.truncation.max(40.0 / x.re));
    let q = hankel_log_integral(&kernel2(w1, w2), x, &k)?;
    let b = bernoulli22(x, C64::new(w1, 0.0), C64::new(w2, 0.0))?;
    Ok(SpecialValue { value: q.value + 0.5 * EULER_GAMMA * b, est_error: q.est_error })
}

/// ln Γ₂ anywhere off its poles, continued through the shift relation.
pub fn log_gamma2_continued(x: C64, w1: f64, w2: f64) -> Result<SpecialValue> {
    let q = l2(x, w1, w2)?;
    let b = bernoulli22(x, C64::new(w1, 0.0), C64::new(w2, 0.0))?;
    Ok(SpecialValue { value: q.value + 0.5 * EULER_GAMMA * b, est_error: q.est_error })
}
