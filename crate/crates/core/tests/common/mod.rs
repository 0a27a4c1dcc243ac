//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's elliptic or quadrature routines.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Adaptive Simpson with Richardson correction.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// `K(k)` from the `theta` form `int dtheta / sqrt(1 - m sin^2)`.
pub fn k_quad(k: f64) -> f64 {
    let m = k * k;
    simpson(&|t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-14)
}

pub fn e_quad(k: f64) -> f64 {
    let m = k * k;
    simpson(&|t: f64| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-14)
}

/// Incomplete `F(phi | m)`.
pub fn f_incomplete(phi: f64, m: f64) -> f64 {
    simpson(&|t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 1e-14)
}

/// Amplitude `phi` with `F(phi | m) = u` by bisection on `[0, u]`, where
/// `F(phi) >= phi`; `sn = sin phi`, `cn = cos phi`.
pub fn amplitude(u: f64, m: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, u);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f_incomplete(mid, m) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Classical RK4 with a fixed step, for cross-checking the adaptive solver.
pub fn rk4<const N: usize, F: Fn(&[f64; N]) -> [f64; N]>(f: F, y0: [f64; N], t_end: f64, steps: usize) -> [f64; N] {
    let h = t_end / steps as f64;
    let mut y = y0;
    let add = |a: &[f64; N], b: &[f64; N], s: f64| -> [f64; N] { std::array::from_fn(|i| a[i] + s * b[i]) };
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&add(&y, &k1, 0.5 * h));
        let k3 = f(&add(&y, &k2, 0.5 * h));
        let k4 = f(&add(&y, &k3, h));
        y = std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    y
}

/// Maclaurin coefficients of `2K/pi` in `m`, `((2n)!/(4^n n!^2))^2`.
pub fn k_series_coefficients(n: usize) -> Vec<f64> {
    let mut p = 1.0;
    (0..n)
        .map(|i| {
            if i > 0 {
                p *= (2 * i - 1) as f64 / (2 * i) as f64;
            }
            p * p
        })
        .collect()
}

/// The `epsilon = 0` rescaled vector field.
pub fn limit_field(y: &[f64; 3]) -> [f64; 3] {
    [y[1], -y[0] * y[2], y[0] * y[1]]
}

pub fn conserved_ab(y: &[f64; 3]) -> (f64, f64) {
    (0.5 * y[0] * y[0] - y[2], (y[1] * y[1] + y[2] * y[2]).sqrt())
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
