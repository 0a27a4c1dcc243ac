//! Simulation with a slowly varying `lambda` and detection of attractor
//! switches from windowed transport.

use std::ops::ControlFlow;

use super::integrator::{integrate_with, IntegratorOptions};
use crate::error::{Error, Result};
use crate::orbits::{Frame, State3};

/// Time dependence of `lambda`, realised through `sigma(t) = lambda(t)(beta + 2) - 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSchedule {
    Constant(f64),
    /// `lambda0 + (peak - lambda0)(1 - (2t/t_end - 1)^2)`.
    Parabolic { lambda0: f64, peak: f64, t_end: f64 },
    /// Linear interpolation between `(t, lambda)` breakpoints.
    Piecewise(Vec<(f64, f64)>),
}

impl LambdaSchedule {
    /// The parabola from `lambda0` to `peak` that crosses `lambda = 1` at
    /// `t_cross` while rising.
    pub fn parabola_crossing_one(lambda0: f64, peak: f64, t_cross: f64) -> Result<Self> {
        if !(lambda0 < 1.0 && peak > 1.0 && t_cross > 0.0) {
            return Err(Error::Schedule("need lambda0 < 1 < peak and t_cross > 0".into()));
        }
        let x = (1.0 - (1.0 - lambda0) / (peak - lambda0)).sqrt();
        Ok(Self::Parabolic { lambda0, peak, t_end: 2.0 * t_cross / (1.0 - x) })
    }

    pub fn lambda(&self, t: f64) -> f64 {
        match self {
            Self::Constant(l) => *l,
            Self::Parabolic { lambda0, peak, t_end } => {
                let x = 2.0 * t / t_end - 1.0;
                lambda0 + (peak - lambda0) * (1.0 - x * x)
            }
            Self::Piecewise(points) => {
                let i = points.partition_point(|p| p.0 <= t);
                if i == 0 {
                    points[0].1
                } else if i == points.len() {
                    points[i - 1].1
                } else {
                    let (t0, l0) = points[i - 1];
                    let (t1, l1) = points[i];
                    l0 + (l1 - l0) * (t - t0) / (t1 - t0)
                }
            }
        }
    }

    pub fn duration(&self) -> Option<f64> {
        match self {
            Self::Constant(_) => None,
            Self::Parabolic { t_end, .. } => Some(*t_end),
            Self::Piecewise(points) => points.last().map(|p| p.0),
        }
    }

    /// Checks `lambda(t) > 0` and `sigma(t) > 0` over `[0, t_end]`.
    pub fn validate(&self, beta: f64, t_end: f64) -> Result<()> {
        if let Self::Piecewise(points) = self {
            if points.is_empty() || points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                return Err(Error::Schedule("breakpoint times must increase".into()));
            }
        }
        let floor = 1.0 / (beta + 2.0);
        let n = 1000;
        for i in 0..=n {
            let l = self.lambda(t_end * i as f64 / n as f64);
            if !(l > floor) || !l.is_finite() {
                return Err(Error::Schedule(format!("lambda = {l} gives sigma <= 0")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttractorKind {
    /// Steady, near one of the equilibria `X+-`.
    Equilibrium,
    Oscillating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub t_start: f64,
    pub t_end: f64,
    pub lambda_mid: f64,
    /// Average of `XY` over the window.
    pub local_h: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub x_end: f64,
    pub kind: AttractorKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchEvent {
    pub t: f64,
    pub lambda: f64,
    pub from: AttractorKind,
    pub to: AttractorKind,
    /// Relative change of local transport across the switch.
    pub jump: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HysteresisOptions {
    pub window: f64,
    /// Relative change of windowed transport that counts as a switch.
    pub jump_threshold: f64,
    /// X oscillation amplitude, relative to `sqrt(beta(rho - 1))`, below which
    /// a window counts as steady.
    pub steady_amplitude: f64,
    pub integrator: IntegratorOptions,
}

impl Default for HysteresisOptions {
    fn default() -> Self {
        Self {
            window: 5.0,
            jump_threshold: 0.2,
            steady_amplitude: 0.1,
            integrator: IntegratorOptions::tolerances(1e-10, 1e-10),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HysteresisRun {
    pub windows: Vec<Window>,
    pub events: Vec<SwitchEvent>,
    pub final_state: State3,
}

pub fn classify_window(x_min: f64, x_max: f64, rho: f64, beta: f64, steady_amplitude: f64) -> AttractorKind {
    let scale = (beta * (rho - 1.0)).max(1.0).sqrt();
    if (x_max - x_min) < steady_amplitude * scale {
        AttractorKind::Equilibrium
    } else {
        AttractorKind::Oscillating
    }
}

/// Integrates the Lorenz equations with `sigma(t)` following `schedule` and
/// records windowed transport and attractor switches.
pub fn hysteresis_run(
    rho: f64,
    beta: f64,
    schedule: &LambdaSchedule,
    x0: &State3,
    t_end: f64,
    opts: &HysteresisOptions,
) -> Result<HysteresisRun> {
    x0.require(Frame::Original)?;
    schedule.validate(beta, t_end)?;
    if !(opts.window > 0.0 && t_end > 0.0) {
        return Err(Error::Domain("window and t_end must be positive".into()));
    }
    let f = |t: f64, y: &[f64; 3]| {
        let sigma = schedule.lambda(t) * (beta + 2.0) - 1.0;
        super::systems::lorenz(y, sigma, beta, rho)
    };
    let n_windows = (t_end / opts.window).ceil() as usize;
    let mut windows = Vec::with_capacity(n_windows);
    let mut y = x0.v;
    for w in 0..n_windows {
        let t0 = w as f64 * opts.window;
        let t1 = (t0 + opts.window).min(t_end);
        let (mut xy, mut x_min, mut x_max) = (0.0, y[0], y[0]);
        integrate_with(f, t0, y, t1, &opts.integrator, |step| {
            xy += step.simpson(|v| v[0] * v[1]);
            x_min = x_min.min(step.y1[0]);
            x_max = x_max.max(step.y1[0]);
            y = step.y1;
            ControlFlow::Continue(())
        })?;
        let local_h = xy / (t1 - t0);
        windows.push(Window {
            t_start: t0,
            t_end: t1,
            lambda_mid: schedule.lambda(0.5 * (t0 + t1)),
            local_h,
            x_min,
            x_max,
            x_end: y[0],
            kind: classify_window(x_min, x_max, rho, beta, opts.steady_amplitude),
        });
    }
    let events = detect_switches(&windows, opts.jump_threshold);
    Ok(HysteresisRun { windows, events, final_state: State3::original(y[0], y[1], y[2]) })
}

/// A switch is a change of window kind that persists for the next two
/// windows, or a relative transport jump above `threshold` that comes with
/// a kind change.
fn detect_switches(windows: &[Window], threshold: f64) -> Vec<SwitchEvent> {
    let mut events = Vec::new();
    let mut current = match windows.first() {
        Some(w) => w.kind,
        None => return events,
    };
    let mut h_prev = windows[0].local_h;
    for i in 1..windows.len() {
        let w = &windows[i];
        if w.kind != current {
            let persists = windows[i..].iter().take(3).all(|v| v.kind == w.kind);
            let jump = (w.local_h - h_prev).abs() / h_prev.abs().max(f64::MIN_POSITIVE);
            if persists || jump > threshold {
                events.push(SwitchEvent { t: w.t_start, lambda: w.lambda_mid, from: current, to: w.kind, jump });
                current = w.kind;
            }
        }
        h_prev = w.local_h;
    }
    events
}
