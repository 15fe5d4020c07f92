use crate::C64;

// B_0 .. B_30 (odd entries past B_1 vanish)
const B: [f64; 31] = [
    1.0,
    -0.5,
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    5.0 / 66.0,
    0.0,
    -691.0 / 2730.0,
    0.0,
    7.0 / 6.0,
    0.0,
    -3617.0 / 510.0,
    0.0,
    43867.0 / 798.0,
    0.0,
    -174611.0 / 330.0,
    0.0,
    854513.0 / 138.0,
    0.0,
    -236364091.0 / 2730.0,
    0.0,
    8553103.0 / 6.0,
    0.0,
    -23749461029.0 / 870.0,
    0.0,
    8615841276005.0 / 14322.0,
];

/// Bernoulli number B_n for n <= 30.
pub fn bernoulli_number(n: usize) -> f64 {
    assert!(n < B.len(), "bernoulli_number: n = {n} out of table");
    B[n]
}

fn binom(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for j in 0..k {
        r = r * (n - j) as f64 / (j + 1) as f64;
    }
    r
}

/// Bernoulli polynomial B_n(x).
pub fn bernoulli_poly(n: usize, x: C64) -> C64 {
    // Horner on sum_k C(n,k) B_k x^{n-k}
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..=n {
        acc = acc * x + binom(n, k) * bernoulli_number(k);
    }
    acc
}

/// Hurwitz zeta ζ(s, a) for integer s >= 2 and real a > 0 (Euler-Maclaurin).
pub fn hurwitz_zeta(s: u32, a: f64) -> f64 {
    assert!(s >= 2 && a > 0.0);
    let sf = s as f64;
    let shift = if a < 20.0 { (20.0 - a).ceil() as usize } else { 0 };
    let mut sum = 0.0;
    for n in 0..shift {
        sum += (a + n as f64).powf(-sf);
    }
    let b = a + shift as f64;
    sum += b.powf(1.0 - sf) / (sf - 1.0) + 0.5 * b.powf(-sf);
    // rising factorial s (s+1) ... (s+2j-2) / (2j)!
    let mut coef = sf;
    let mut fact = 2.0;
    let mut pw = b.powf(-sf - 1.0);
    for j in 1..=10 {
        sum += bernoulli_number(2 * j) / fact * coef * pw;
        coef *= (sf + 2.0 * j as f64 - 1.0) * (sf + 2.0 * j as f64);
        fact *= (2 * j + 1) as f64 * (2 * j + 2) as f64;
        pw /= b * b;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_two_is_pi_squared_over_six() {
        let z = hurwitz_zeta(2, 1.0);
        assert!((z - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        // ζ(3, 2) = ζ(3) - 1
        assert!((hurwitz_zeta(3, 2.0) - (1.202_056_903_159_594_3 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn bernoulli_poly_difference() {
        // B_n(x+1) - B_n(x) = n x^{n-1}
        let x = C64::new(0.3, -0.7);
        for n in 1..9 {
            let d = bernoulli_poly(n, x + 1.0) - bernoulli_poly(n, x);
            let r = x.powu(n as u32 - 1) * n as f64;
            assert!((d - r).norm() < 1e-12, "n={n}");
        }
    }
}
