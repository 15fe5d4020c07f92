//! Small dense complex-matrix helpers.

use crate::C64;
use nalgebra::DMatrix;

pub type CMat = DMatrix<C64>;

pub fn zeros(n: usize, m: usize) -> CMat {
    CMat::from_element(n, m, C64::new(0.0, 0.0))
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn diag(d: &[C64]) -> CMat {
    let mut m = zeros(d.len(), d.len());
    for (i, v) in d.iter().enumerate() {
        m[(i, i)] = *v;
    }
    m
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// ‖a − b‖_max.
pub fn diff_max(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}

/// ‖a − b‖_max / max(‖a‖_max, ‖b‖_max), zero when both vanish.
pub fn rel_diff(a: &CMat, b: &CMat) -> f64 {
    let s = max_abs(a).max(max_abs(b));
    if s == 0.0 {
        0.0
    } else {
        diff_max(a, b) / s
    }
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn is_finite(a: &CMat) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}
