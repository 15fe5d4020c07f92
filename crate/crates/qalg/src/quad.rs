//! Quadrature rules shared by the transform and contour code.
//!
//! Gauss-Legendre nodes come from Newton iteration on P_n; the adaptive
//! integrator is a plain Gauss-Kronrod 10/21 bisection scheme.

use num_complex::Complex64 as C64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Tricomi initial guess
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_and_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (z * p - p0) / (z * z - 1.0);
    (p, d)
}

/// Cached 16-point rule used for composite panels.
pub fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Composite 16-point Gauss-Legendre along the straight segment z0 -> z1
/// with `panels` equal panels. Returns the integral of f(z) dz.
pub fn segment_integral<F: Fn(C64) -> C64>(f: &F, z0: C64, z1: C64, panels: usize) -> C64 {
    let (xs, ws) = gl16();
    let panels = panels.max(1);
    let dz = (z1 - z0) / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        let a = z0 + dz * p as f64;
        let mid = a + dz * 0.5;
        let mut s = C64::new(0.0, 0.0);
        for (x, w) in xs.iter().zip(ws.iter()) {
            s += f(mid + dz * (0.5 * x)) * *w;
        }
        acc += s * dz * 0.5;
    }
    acc
}

/// Composite Gauss-Legendre on a real interval for a complex-valued integrand.
pub fn composite_real<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, panels: usize) -> C64 {
    let g = |z: C64| f(z.re);
    segment_integral(&g, C64::new(a, 0.0), C64::new(b, 0.0), panels)
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525775188,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

fn gk21<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = C64::new(0.0, 0.0);
    for j in 0..10 {
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

struct Piece {
    a: f64,
    b: f64,
    val: C64,
    err: f64,
}
impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.partial_cmp(&o.err).unwrap_or(Ordering::Equal)
    }
}

/// Result of the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: C64,
    pub err: f64,
    pub converged: bool,
}

/// Adaptive Gauss-Kronrod integration over [a, b], starting from the given
/// breakpoints (sorted, inside (a, b)).
pub fn adaptive<F: Fn(f64) -> C64>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_pieces: usize,
) -> QuadResult {
    let mut pts = vec![a];
    for &x in breaks {
        if x > a && x < b {
            pts.push(x);
        }
    }
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut heap = BinaryHeap::new();
    let mut total = C64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in pts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk21(f, w[0], w[1]);
        total += v;
        err += e;
        heap.push(Piece { a: w[0], b: w[1], val: v, err: e });
    }
    while err > abs_tol.max(rel_tol * total.norm()) && heap.len() < max_pieces {
        let p = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = gk21(f, p.a, m);
        let (v2, e2) = gk21(f, m, p.b);
        total += v1 + v2 - p.val;
        err += e1 + e2 - p.err;
        heap.push(Piece { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Piece { a: m, b: p.b, val: v2, err: e2 });
    }
    // re-sum to limit drift from the running updates
    let mut value = C64::new(0.0, 0.0);
    let mut e = 0.0;
    for p in heap.iter() {
        value += p.val;
        e += p.err;
    }
    let converged = e <= abs_tol.max(rel_tol * value.norm());
    QuadResult { value, err: e, converged }
}

/// Richardson extrapolation to h -> 0 for samples at h, h/2, h/4, ...
/// assuming an error expansion in integer powers of h.
pub fn richardson(values: &[C64]) -> C64 {
    let mut t: Vec<C64> = values.to_vec();
    let n = t.len();
    for k in 1..n {
        let f = (1u64 << k) as f64;
        for i in (k..n).rev() {
            t[i] = (t[i] * f - t[i - 1]) / (f - 1.0);
        }
    }
    t[n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let tot: f64 = w.iter().sum();
        assert!((tot - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_a_peak() {
        let f = |x: f64| C64::new(1.0 / (1e-4 + x * x), 0.0);
        let r = adaptive(&f, -1.0, 1.0, &[], 1e-12, 1e-12, 2000);
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value.re - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn richardson_removes_linear_and_quadratic_terms() {
        let f = |h: f64| C64::new(1.0 + 2.0 * h - 3.0 * h * h, 0.0);
        let v = richardson(&[f(0.1), f(0.05), f(0.025)]);
        assert!((v.re - 1.0).abs() < 1e-13);
    }
}
