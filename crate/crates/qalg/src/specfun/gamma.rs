use super::bernoulli::{bernoulli_number, hurwitz_zeta};
use crate::error::{QalgError, Result};
use crate::{C64, EULER_GAMMA};
use std::f64::consts::PI;
use std::sync::OnceLock;

const STIRLING_MIN: f64 = 15.0;

/// ln Γ(z), continued analytically from the positive real axis with the cut
/// along the negative real axis. On the cut the value is the limit from
/// above. Off the cut this agrees with the principal log of Γ up to a
/// multiple of 2πi, and exp(log_gamma) is Γ everywhere.
pub fn log_gamma(z: C64) -> Result<C64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(QalgError::Params(format!("log_gamma: non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(QalgError::Pole(format!("Gamma at nonpositive integer {}", z.re)));
    }
    let x1 = z - 1.0;
    if x1.norm() < 0.25 {
        return Ok(series_near_one(x1, false));
    }
    let x2 = z - 2.0;
    if x2.norm() < 0.25 {
        return Ok(series_near_one(x2, true));
    }
    let mut w = z;
    // real part of the shift from a running product (rescaled), imaginary part
    // from a sum of arguments, so the branch stays continuous
    let mut prod = 1.0f64;
    let mut log_scale = 0.0f64;
    let mut arg_sum = 0.0f64;
    let real_axis = z.im == 0.0;
    while w.re < STIRLING_MIN {
        let m = w.norm();
        if m == 0.0 {
            return Err(QalgError::Pole(format!("Gamma at nonpositive integer {}", z.re)));
        }
        prod *= m;
        if prod > 1e200 || prod < 1e-200 {
            log_scale += prod.ln();
            prod = 1.0;
        }
        arg_sum += if real_axis {
            if w.re < 0.0 {
                PI
            } else {
                0.0
            }
        } else {
            w.im.atan2(w.re)
        };
        w += 1.0;
    }
    let s = stirling(w);
    Ok(C64::new(s.re - prod.ln() - log_scale, s.im - arg_sum))
}

fn zeta_values() -> &'static [f64; 32] {
    static Z: OnceLock<[f64; 32]> = OnceLock::new();
    Z.get_or_init(|| {
        let mut z = [0.0; 32];
        for (k, v) in z.iter_mut().enumerate().skip(2) {
            *v = hurwitz_zeta(k as u32, 1.0);
        }
        z
    })
}

// ln Γ(1+x) = -γx + Σ (-1)^k ζ(k) x^k / k, and the ln Γ(2+x) variant with
// ζ(k) - 1; keeps relative accuracy at the zeros z = 1, 2
fn series_near_one(x: C64, two: bool) -> C64 {
    let z = zeta_values();
    let lead = if two { 1.0 - EULER_GAMMA } else { -EULER_GAMMA };
    let mut acc = x * lead;
    let mut p = x;
    for k in 2..32 {
        p *= -x;
        let zk = if two { z[k] - 1.0 } else { z[k] };
        acc -= p * (zk / k as f64);
    }
    acc
}

fn stirling(w: C64) -> C64 {
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let mut acc = (w - 0.5) * w.ln() - w + half_ln_2pi;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut p = inv;
    for k in 1..=12 {
        let b = bernoulli_number(2 * k);
        acc += p * (b / ((2 * k) as f64 * (2 * k - 1) as f64));
        p *= inv2;
    }
    acc
}

/// Γ(z).
pub fn gamma(z: C64) -> Result<C64> {
    Ok(log_gamma(z)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: f64, b: f64) -> C64 {
        C64::new(a, b)
    }

    #[test]
    fn classical_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(log_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-15);
        let h = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((h.re - 0.5 * PI.ln()).abs() < 1e-14 && h.im == 0.0);
        // Γ(10) = 9!
        let g = gamma(c(10.0, 0.0)).unwrap();
        assert!((g.re - 362880.0).abs() < 1e-9);
    }

    #[test]
    fn poles_are_errors() {
        for n in 0..5 {
            assert!(matches!(log_gamma(c(-(n as f64), 0.0)), Err(QalgError::Pole(_))));
        }
    }

    #[test]
    fn reflection_formula() {
        // Γ(z)Γ(1-z) = π / sin(πz)
        for &z in &[c(0.3, 0.4), c(-2.7, 1.1), c(4.2, -3.3), c(-0.5, 0.0)] {
            let lhs = (log_gamma(z).unwrap() + log_gamma(1.0 - z).unwrap()).exp();
            let rhs = PI / (z * PI).sin();
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm(), "z = {z}");
        }
    }

    #[test]
    fn recursion_on_grid() {
        let z = c(3.7, 1.2);
        let d = log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap() - z.ln();
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn reference_value_off_axis() {
        // ln Γ(1 + i) from a high-precision table
        let v = log_gamma(c(1.0, 1.0)).unwrap();
        assert!((v - c(-0.650_923_199_301_856_34, -0.301_640_320_467_533_2)).norm() < 1e-14);
    }
}
