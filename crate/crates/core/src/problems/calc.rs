//! Closed-form partial derivatives of the elementary pieces used by the catalog.

use std::f64::consts::FRAC_PI_2;

/// `d^n/dx^n sin(k x)`.
pub fn sin_d(k: f64, x: f64, n: u32) -> f64 {
    k.powi(n as i32) * (k * x + n as f64 * FRAC_PI_2).sin()
}

/// `d^n/dx^n e^{k x}`.
pub fn exp_d(k: f64, x: f64, n: u32) -> f64 {
    k.powi(n as i32) * (k * x).exp()
}

/// `d^n/dx^n x^p` for real `p`.
pub fn pow_d(p: f64, x: f64, n: u32) -> f64 {
    let mut c = 1.0;
    for i in 0..n {
        c *= p - i as f64;
    }
    if c == 0.0 {
        0.0
    } else {
        c * x.powf(p - n as f64)
    }
}

/// `d^n/dx^n` of the polynomial `Σ c_m x^m`.
pub fn poly_d(coeffs: &[f64], x: f64, n: u32) -> f64 {
    let n = n as usize;
    let mut acc = 0.0;
    for m in (n..coeffs.len()).rev() {
        let ff: f64 = (0..n).map(|i| (m - i) as f64).product();
        acc = acc * x + coeffs[m] * ff;
    }
    acc
}

/// `∂x^a ∂y^b sin(k x y)` via `Im(e^{ikxy})` and the Leibniz rule.
pub fn sin_kxy(k: f64, x: f64, y: f64, a: u32, b: u32) -> f64 {
    // ∂x^a e^{ikxy} = (iky)^a e^{ikxy}; then differentiate b times in y.
    let (a, b) = (a as i32, b as i32);
    let phase = k * x * y;
    let mut im = 0.0;
    for j in 0..=b.min(a) {
        // C(b, j) · a!/(a-j)! · y^{a-j} · (ik)^a · (ikx)^{b-j}
        let binom = binomial(b as u32, j as u32);
        let falling: f64 = (0..j).map(|i| (a - i) as f64).product();
        let mag = binom * falling * y.powi(a - j) * k.powi(a) * (k * x).powi(b - j);
        let ipow = (a + b - j).rem_euclid(4);
        // i^ipow · e^{i phase}, keep the imaginary part
        let (cr, ci) = match ipow {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
        im += mag * (cr * phase.sin() + ci * phase.cos());
    }
    im
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `∂x^a ∂y^b sin(x² y)` for `a + b ≤ 2`.
pub fn sin_x2y(x: f64, y: f64, a: u32, b: u32) -> Option<f64> {
    let u = x * x * y;
    let (s, c) = u.sin_cos();
    Some(match (a, b) {
        (0, 0) => s,
        (1, 0) => 2.0 * x * y * c,
        (0, 1) => x * x * c,
        (2, 0) => 2.0 * y * c - 4.0 * x * x * y * y * s,
        (1, 1) => 2.0 * x * c - 2.0 * x.powi(3) * y * s,
        (0, 2) => -x.powi(4) * s,
        _ => return None,
    })
}

/// `d^n/dx^n x`.
pub fn lin_d(x: f64, n: u32) -> f64 {
    match n {
        0 => x,
        1 => 1.0,
        _ => 0.0,
    }
}

/// Derivative of a constant: `c` for order zero, `0` otherwise.
pub fn const_d(c: f64, n: u32) -> f64 {
    if n == 0 {
        c
    } else {
        0.0
    }
}
