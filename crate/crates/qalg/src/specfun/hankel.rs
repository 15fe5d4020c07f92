use crate::error::{QalgError, Result};
use crate::quad::segment_integral;
use crate::C64;
use std::f64::consts::PI;

/// Keyhole contour around λ = 0: an upper ray Im λ = ray_offset coming in
/// from Re λ = truncation, a counterclockwise arc of the given radius through
/// the negative axis, and a lower ray going back out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelContour {
    pub radius: f64,
    pub ray_offset: f64,
    pub truncation: f64,
    pub nodes_per_unit: usize,
    /// relative tolerance for the doubling estimate
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialValue {
    pub value: C64,
    pub est_error: f64,
}

impl HankelContour {
    pub fn new(radius: f64, ray_offset: f64, truncation: f64, nodes_per_unit: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(QalgError::Params("contour radius must be positive".into()));
        }
        if !(ray_offset > 0.0 && ray_offset < radius) {
            return Err(QalgError::Params("ray offset must lie in (0, radius)".into()));
        }
        if !(truncation > 10.0 * radius) {
            return Err(QalgError::Params("truncation must exceed 10 radius".into()));
        }
        if nodes_per_unit == 0 {
            return Err(QalgError::Params("nodes_per_unit must be positive".into()));
        }
        Ok(HankelContour { radius, ray_offset, truncation, nodes_per_unit, tol: 1e-9 })
    }

    /// Default contour for kernels built from 1/(1 - e^{-ωλ}) factors:
    /// radius below the first nonzero pole 2π/max ω, truncation 80/min ω.
    pub fn for_periods(periods: &[f64]) -> Result<Self> {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for &w in periods {
            if !(w > 0.0) {
                return Err(QalgError::ZeroPeriod);
            }
            lo = lo.min(w);
            hi = hi.max(w);
        }
        if periods.is_empty() {
            lo = 1.0;
            hi = 1.0;
        }
        let radius = 0.5f64.min(PI / hi);
        HankelContour::new(radius, 0.5 * radius, (80.0 / lo).max(11.0 * radius), 64)
    }

    pub fn with_truncation(mut self, t: f64) -> Self {
        self.truncation = t.max(11.0 * self.radius);
        self
    }

    pub fn with_radius(mut self, r: f64) -> Self {
        self.radius = r;
        self.ray_offset = 0.5 * r;
        self.truncation = self.truncation.max(11.0 * r);
        self
    }

    pub fn with_nodes(mut self, n: usize) -> Self {
        self.nodes_per_unit = n.max(1);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn x0(&self) -> f64 {
        (self.radius * self.radius - self.ray_offset * self.ray_offset).sqrt()
    }
}

/// ln(-λ) on the principal branch.
fn ln_minus(l: C64) -> C64 {
    (-l).ln()
}

fn raw<F: Fn(C64) -> C64>(f: &F, k: &HankelContour, npu: usize) -> C64 {
    let d = k.ray_offset;
    let x0 = k.x0();
    let t = k.truncation;
    let ray_panels = (((t - x0) * npu as f64) / 16.0).ceil() as usize;
    let upper = segment_integral(f, C64::new(t, d), C64::new(x0, d), ray_panels);
    let lower = segment_integral(f, C64::new(x0, -d), C64::new(t, -d), ray_panels);
    let th0 = d.atan2(x0);
    let arc_len = k.radius * (2.0 * PI - 2.0 * th0);
    let arc_panels = ((arc_len * npu as f64 / 16.0).ceil() as usize).max(4);
    let r = k.radius;
    // λ = r e^{iθ}, dλ = i λ dθ
    let g = |th: C64| {
        let l = C64::from_polar(r, th.re);
        f(l) * C64::new(0.0, 1.0) * l
    };
    let arc = segment_integral(&g, C64::new(th0, 0.0), C64::new(2.0 * PI - th0, 0.0), arc_panels);
    upper + arc + lower
}

/// ∫ f(λ) dλ along the contour, with a doubling error estimate.
pub fn hankel_integral<F: Fn(C64) -> C64>(f: &F, k: &HankelContour) -> Result<SpecialValue> {
    let d = k.ray_offset;
    let t = k.truncation;
    let x0 = k.x0();
    let mid = 0.5 * (t + x0);
    let scale = f(C64::new(-k.radius, 0.0))
        .norm()
        .max(f(C64::new(mid, d)).norm())
        .max(f(C64::new(x0, d)).norm());
    let tail = f(C64::new(t, d)).norm().max(f(C64::new(t, -d)).norm());
    if !tail.is_finite() || !scale.is_finite() {
        return Err(QalgError::NonDecaying("integrand is not finite on the contour".into()));
    }
    if tail > 1e-12 * scale.max(1e-300) && tail > 1e-300 {
        return Err(QalgError::NonDecaying(format!(
            "|f| at truncation {t} is {tail:e} against scale {scale:e}"
        )));
    }
    let a = raw(f, k, k.nodes_per_unit);
    let b = raw(f, k, 2 * k.nodes_per_unit);
    if !b.re.is_finite() || !b.im.is_finite() {
        return Err(QalgError::NonDecaying("quadrature produced a non-finite value".into()));
    }
    let est = (b - a).norm();
    if est > k.tol * b.norm().max(1.0) {
        return Err(QalgError::NonConvergence {
            what: "hankel contour quadrature".into(),
            est,
            tol: k.tol,
        });
    }
    Ok(SpecialValue { value: b, est_error: est })
}

/// ∫ ln(-λ)/(2πiλ) e^{-xλ} kernel(λ) dλ along the contour.
pub fn hankel_log_integral<K: Fn(C64) -> C64>(kernel: &K, x: C64, k: &HankelContour) -> Result<SpecialValue> {
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let f = |l: C64| {
        let kv = kernel(l);
        if kv == C64::new(0.0, 0.0) {
            return kv;
        }
        ln_minus(l) / (two_pi_i * l) * (-x * l).exp() * kv
    };
    hankel_integral(&f, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::log_gamma;
    use crate::EULER_GAMMA;

    fn gamma_identity(x: f64, eta: f64) -> f64 {
        let k = HankelContour::for_periods(&[1.0 / eta]).unwrap().with_truncation(40.0 / x);
        let ker = |l: C64| 1.0 / (1.0 - (-l / eta).exp());
        let v = hankel_log_integral(&ker, C64::new(x, 0.0), &k).unwrap();
        let ex = log_gamma(C64::new(eta * x, 0.0)).unwrap()
            + (eta * x - 0.5) * (EULER_GAMMA - eta.ln())
            - 0.5 * (2.0 * PI).ln();
        (v.value - ex).norm()
    }

    #[test]
    fn reproduces_log_gamma_identity() {
        for &x in &[0.5, 1.3, 2.7] {
            for &eta in &[0.5, 0.7, 1.0] {
                let r = gamma_identity(x, eta);
                assert!(r < 1e-10, "x={x} eta={eta} residual {r:e}");
            }
        }
    }

    #[test]
    fn zero_kernel_gives_zero() {
        let k = HankelContour::for_periods(&[1.0]).unwrap();
        let v = hankel_log_integral(&|_l: C64| C64::new(0.0, 0.0), C64::new(1.0, 0.0), &k).unwrap();
        assert_eq!(v.value, C64::new(0.0, 0.0));
    }

    #[test]
    fn radius_invariance() {
        let ker = |l: C64| 1.0 / (1.0 - (-l / 0.7).exp());
        let x = C64::new(1.3, 0.2);
        let k1 = HankelContour::new(0.5, 0.25, 80.0, 64).unwrap();
        let k2 = HankelContour::new(1.0, 0.5, 80.0, 64).unwrap();
        let a = hankel_log_integral(&ker, x, &k1).unwrap();
        let b = hankel_log_integral(&ker, x, &k2).unwrap();
        assert!((a.value - b.value).norm() < 1e-11 + a.est_error + b.est_error);
    }

    #[test]
    fn growing_integrand_is_rejected() {
        let k = HankelContour::for_periods(&[1.0]).unwrap();
        let r = hankel_log_integral(&|_l: C64| C64::new(1.0, 0.0), C64::new(-0.5, 0.0), &k);
        assert!(matches!(r, Err(QalgError::NonDecaying(_))));
    }

    #[test]
    fn invariants_enforced() {
        assert!(HankelContour::new(0.5, 0.6, 80.0, 64).is_err());
        assert!(HankelContour::new(0.5, 0.2, 4.0, 64).is_err());
        assert!(HankelContour::new(-1.0, 0.2, 80.0, 64).is_err());
    }
}
