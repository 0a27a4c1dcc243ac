//! Dormand–Prince 5(4) pair with PI step control and cubic Hermite dense
//! output between accepted steps.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h0: Option<f64>,
    pub max_step: f64,
    pub max_steps: usize,
    /// Abort when any component exceeds this magnitude.
    pub divergence_limit: f64,
    /// Only the leading components enter step-size control; `None` means all.
    pub error_components: Option<usize>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            h0: None,
            max_step: f64::INFINITY,
            max_steps: 50_000_000,
            divergence_limit: 1e8,
            error_components: None,
        }
    }
}

impl IntegratorOptions {
    pub fn tolerances(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
    pub max_error_estimate: f64,
}

/// One accepted step with the data for Hermite interpolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    pub f0: [f64; N],
    pub f1: [f64; N],
}

impl<const N: usize> Step<N> {
    pub fn h(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Cubic Hermite interpolant at `t` in `[t0, t1]`.
    pub fn interpolate(&self, t: f64) -> [f64; N] {
        let h = self.h();
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        std::array::from_fn(|i| {
            h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i]
        })
    }

    pub fn midpoint(&self) -> [f64; N] {
        let h = self.h();
        std::array::from_fn(|i| 0.5 * (self.y0[i] + self.y1[i]) + 0.125 * h * (self.f0[i] - self.f1[i]))
    }

    /// Simpson rule for `g` over the step, using the Hermite midpoint.
    pub fn simpson<G: Fn(&[f64; N]) -> f64>(&self, g: G) -> f64 {
        self.h() / 6.0 * (g(&self.y0) + 4.0 * g(&self.midpoint()) + g(&self.y1))
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn controlled<const N: usize>(opts: &IntegratorOptions) -> usize {
    opts.error_components.map_or(N, |n| n.clamp(1, N))
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], opts: &IntegratorOptions) -> f64 {
    let n = controlled::<N>(opts);
    let sum: f64 = (0..n)
        .map(|i| {
            let sc = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / n as f64).sqrt()
}

fn initial_step<F, const N: usize>(f: &mut F, t0: f64, y0: &[f64; N], f0: &[f64; N], dir: f64, opts: &IntegratorOptions) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let sc: [f64; N] = std::array::from_fn(|i| opts.atol + opts.rtol * y0[i].abs());
    let n = controlled::<N>(opts);
    let norm = |v: &[f64; N]| ((0..n).map(|i| (v[i] / sc[i]).powi(2)).sum::<f64>() / n as f64).sqrt();
    let (d0, d1) = (norm(y0), norm(f0));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y0, dir * h0, &[(1.0, f0)]);
    let f1 = f(t0 + dir * h0, &y1);
    let df: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = norm(&df) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(opts.max_step)
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, calling `observer` after
/// every accepted step. The observer can stop the integration early.
pub fn integrate_with<F, O, const N: usize>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &IntegratorOptions,
    mut observer: O,
) -> Result<IntegratorStats>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&Step<N>) -> ControlFlow<()>,
{
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::Domain("rtol and atol must be positive".into()));
    }
    if !t0.is_finite() || !t_end.is_finite() {
        return Err(Error::Domain("time span must be finite".into()));
    }
    let mut stats = IntegratorStats::default();
    if t_end == t0 {
        return Ok(stats);
    }
    let dir = (t_end - t0).signum();
    let mut t = t0;
    let mut y = y0;
    let mut fy = f(t, &y);
    stats.rhs_evaluations += 1;
    let mut h = match opts.h0 {
        Some(h) => h.abs().min(opts.max_step),
        None => {
            stats.rhs_evaluations += 1;
            initial_step(&mut f, t, &y, &fy, dir, opts)
        }
    };
    let mut err_prev: f64 = 1e-4;
    let mut last_rejected = false;

    while (t_end - t) * dir > 0.0 {
        if stats.steps + stats.rejected_steps >= opts.max_steps {
            return Err(Error::StepUnderflow { t, h, state: y.to_vec() });
        }
        let remaining = (t_end - t).abs();
        let mut hs = h.min(opts.max_step);
        if hs >= remaining || (remaining - hs) < 1e-12 * remaining {
            hs = remaining;
        }
        if hs <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h: hs, state: y.to_vec() });
        }
        let hd = dir * hs;
        let k1 = fy;
        let k2 = f(t + C2 * hd, &axpy(&y, hd, &[(A21, &k1)]));
        let k3 = f(t + C3 * hd, &axpy(&y, hd, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hd, &axpy(&y, hd, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * hd, &axpy(&y, hd, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(t + hd, &axpy(&y, hd, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y1 = axpy(&y, hd, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + hd, &y1);
        stats.rhs_evaluations += 6;
        let errv: [f64; N] = std::array::from_fn(|i| {
            hd * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        });
        let err = error_norm(&errv, &y, &y1, opts);

        if err <= 1.0 && y1.iter().all(|v| v.is_finite()) {
            let t1 = if hs == remaining { t_end } else { t + hd };
            let step = Step { t0: t, t1, y0: y, y1, f0: fy, f1: k7 };
            stats.steps += 1;
            stats.max_error_estimate = stats.max_error_estimate.max(err);
            t = t1;
            y = y1;
            fy = k7;
            if y.iter().any(|v| v.abs() > opts.divergence_limit) {
                return Err(Error::Diverged { t, state: y.to_vec() });
            }
            if observer(&step).is_break() {
                break;
            }
            // PI controller
            let e = err.max(1e-10);
            let mut fac = 0.9 * e.powf(-0.17) * err_prev.powf(0.04);
            fac = fac.clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = hs * fac;
            err_prev = e;
            last_rejected = false;
        } else {
            stats.rejected_steps += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h = hs * fac;
            last_rejected = true;
        }
    }
    Ok(stats)
}

/// Integrates and returns the endpoint value.
pub fn integrate_to<F, const N: usize>(f: F, t0: f64, y0: [f64; N], t_end: f64, opts: &IntegratorOptions) -> Result<([f64; N], IntegratorStats)>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut last = y0;
    let stats = integrate_with(f, t0, y0, t_end, opts, |s| {
        last = s.y1;
        ControlFlow::Continue(())
    })?;
    Ok((last, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exponential_decay() {
        let opts = IntegratorOptions::tolerances(1e-10, 1e-12);
        let (y, stats) = integrate_to(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0, &opts).unwrap();
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-10);
        assert!(stats.steps > 5);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let opts = IntegratorOptions::tolerances(1e-10, 1e-12);
        let (y, _) = integrate_to(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 200.0 * PI, &opts).unwrap();
        let energy = 0.5 * (y[0] * y[0] + y[1] * y[1]);
        assert!((energy - 0.5).abs() < 1e-8);
    }

    #[test]
    fn backward_integration() {
        let opts = IntegratorOptions::tolerances(1e-11, 1e-13);
        let (y, _) = integrate_to(|_, y: &[f64; 1]| [y[0]], 1.0, [1.0], 0.0, &opts).unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn hermite_interpolant_is_cubic_exact() {
        let s = Step { t0: 0.0, t1: 2.0, y0: [0.0], y1: [8.0], f0: [0.0], f1: [12.0] };
        assert!((s.interpolate(1.0)[0] - 1.0).abs() < 1e-15);
        assert!((s.midpoint()[0] - 1.0).abs() < 1e-15);
        assert!((s.simpson(|y| y[0]) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn divergence_is_reported() {
        let opts = IntegratorOptions { divergence_limit: 1e3, ..IntegratorOptions::default() };
        let r = integrate_to(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 2.0, &opts);
        assert!(matches!(r, Err(Error::Diverged { .. }) | Err(Error::StepUnderflow { .. })));
    }

    #[test]
    fn observer_can_stop() {
        let mut n = 0;
        let stats = integrate_with(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 100.0, &IntegratorOptions::default(), |_| {
            n += 1;
            if n == 3 { ControlFlow::Break(()) } else { ControlFlow::Continue(()) }
        })
        .unwrap();
        assert_eq!(stats.steps, 3);
    }
}
