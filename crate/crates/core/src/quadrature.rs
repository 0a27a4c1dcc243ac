//! Trapezoid quadrature with successive doubling.
//!
//! The integrands in this crate are periodic and analytic over one period, or
//! decay like `sech^2` on a truncated line; in both cases the plain trapezoid
//! rule converges geometrically, so doubling until two levels agree is enough.

use crate::error::{Error, Result};

const MAX_LEVEL: u32 = 22;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`, measured against
/// `max(1, integral of |f|)`.
pub fn trapezoid<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate(f, a, b, tol, false)
}

/// Integrates a function with period `b - a`: endpoints are one node.
pub fn periodic<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate(f, a, b, tol, true)
}

/// Integrates several functions sampled together on the same nodes.
pub fn periodic_vec<F, const N: usize>(f: F, a: f64, b: f64, tol: f64) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    let width = b - a;
    let mut n = 16usize;
    let mut sum = [0.0; N];
    let mut abs = [0.0; N];
    for i in 0..n {
        let v = f(a + width * i as f64 / n as f64);
        for j in 0..N {
            sum[j] += v[j];
            abs[j] += v[j].abs();
        }
    }
    let mut prev = sum.map(|s| s * width / n as f64);
    for _ in 0..MAX_LEVEL {
        for i in 0..n {
            let v = f(a + width * (2 * i + 1) as f64 / (2 * n) as f64);
            for j in 0..N {
                sum[j] += v[j];
                abs[j] += v[j].abs();
            }
        }
        n *= 2;
        let cur = sum.map(|s| s * width / n as f64);
        let worst = (0..N)
            .map(|j| (cur[j] - prev[j]).abs() / (abs[j] * width.abs() / n as f64).max(1.0))
            .fold(0.0, f64::max);
        if worst <= tol && n >= 64 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature { achieved: f64::NAN })
}

fn integrate<F>(f: F, a: f64, b: f64, tol: f64, periodic: bool) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let width = b - a;
    let mut n = 16usize;
    let (mut sum, mut abs) = (0.0, 0.0);
    for i in 0..=n {
        if periodic && i == n {
            break;
        }
        let w = if !periodic && (i == 0 || i == n) { 0.5 } else { 1.0 };
        let v = f(a + width * i as f64 / n as f64);
        sum += w * v;
        abs += w * v.abs();
    }
    let mut prev = sum * width / n as f64;
    let mut delta = f64::INFINITY;
    for _ in 0..MAX_LEVEL {
        for i in 0..n {
            let v = f(a + width * (2 * i + 1) as f64 / (2 * n) as f64);
            sum += v;
            abs += v.abs();
        }
        n *= 2;
        let cur = sum * width / n as f64;
        let scale = (abs * width.abs() / n as f64).max(1.0);
        delta = (cur - prev).abs() / scale;
        if delta <= tol && n >= 64 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature { achieved: delta })
}
