//! Direct simulation: adaptive integration, time averages, `(A, B)`
//! projections and the hysteresis protocol.

mod hysteresis;
mod integrator;
mod systems;

use std::ops::ControlFlow;

pub use hysteresis::{
    classify_window, hysteresis_run, AttractorKind, HysteresisOptions, HysteresisRun, LambdaSchedule, SwitchEvent,
    Window,
};
pub use integrator::{integrate_to, integrate_with, IntegratorOptions, IntegratorStats, Step};
pub use systems::{
    lorenz, rescale_map, rescaled, rescaled_jacobian, rhs_lorenz, rhs_rescaled, rhs_stenflo, stenflo,
    stenflo_rescaled, stenflo_rescaled_jacobian, unscale_map, x_plus, Rescaling, State4,
};

use crate::error::{Error, Result};
use crate::melnikov::Params;
use crate::orbits::{classify_region, conserved, ConservedPair, Frame, Region, State3, DEFAULT_REGION_TOL};
use crate::transport::TimeAverages;

/// Which points of a run are stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    /// Every accepted step.
    Steps,
    /// Uniform times by Hermite interpolation.
    Every(f64),
    /// Only the final state.
    Final,
}

/// Time-stamped states of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub frame: Frame,
    pub params: Option<Params>,
    pub stats: IntegratorStats,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> Option<(f64, [f64; N])> {
        Some((*self.times.last()?, *self.states.last()?))
    }
}

/// Integrates `f` and records states according to `sampling`.
pub fn integrate<F, const N: usize>(
    f: F,
    frame: Frame,
    y0: [f64; N],
    t_span: (f64, f64),
    opts: &IntegratorOptions,
    sampling: Sampling,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let (t0, t1) = t_span;
    let mut times = vec![t0];
    let mut states = vec![y0];
    let mut next = t0;
    let mut last = (t0, y0);
    let stats = integrate_with(f, t0, y0, t1, opts, |step| {
        last = (step.t1, step.y1);
        match sampling {
            Sampling::Steps => {
                times.push(step.t1);
                states.push(step.y1);
            }
            Sampling::Every(dt) => {
                while next + dt <= step.t1 + 1e-12 * dt {
                    next += dt;
                    let t = next.min(step.t1);
                    times.push(t);
                    states.push(step.interpolate(t));
                }
            }
            Sampling::Final => {}
        }
        ControlFlow::Continue(())
    });
    let stats = stats?;
    if matches!(sampling, Sampling::Final) {
        times.push(last.0);
        states.push(last.1);
    }
    Ok(Trajectory { times, states, frame, params: None, stats })
}

/// Integrates the Lorenz equations in the original frame.
pub fn simulate_lorenz(
    params: &Params,
    x0: &State3,
    t_end: f64,
    opts: &IntegratorOptions,
    sampling: Sampling,
) -> Result<Trajectory<3>> {
    x0.require(Frame::Original)?;
    let rho = params.rho().ok_or_else(|| Error::Domain("rho is required".into()))?;
    let (sigma, beta) = (params.sigma(), params.beta());
    let mut traj = integrate(|_, y| lorenz(y, sigma, beta, rho), Frame::Original, x0.v, (0.0, t_end), opts, sampling)?;
    traj.params = Some(*params);
    Ok(traj)
}

/// Integrates the rescaled equations; times are `tau`.
pub fn simulate_rescaled(
    params: &Params,
    x0: &State3,
    tau_end: f64,
    opts: &IntegratorOptions,
    sampling: Sampling,
) -> Result<Trajectory<3>> {
    x0.require(Frame::Rescaled)?;
    let eps = params.require_epsilon()?;
    let (sigma, beta) = (params.sigma(), params.beta());
    let mut traj = integrate(|_, y| rescaled(y, eps, sigma, beta), Frame::Rescaled, x0.v, (0.0, tau_end), opts, sampling)?;
    traj.params = Some(*params);
    Ok(traj)
}

/// Result of a transport measurement, in original-frame units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportMeasurement {
    /// Time average of `XY`.
    pub h: f64,
    /// `beta <Z>`, equal to `h` in the long-time limit.
    pub beta_avg_z: f64,
    /// Standard error of `h` from ten block means.
    pub stderr_proxy: f64,
    pub averages: TimeAverages,
    pub final_state: State3,
    pub stats: IntegratorStats,
}

const BLOCKS: usize = 10;

/// Accumulated monomial integrals of one averaged run in the rescaled frame.
pub(crate) struct AveragedRun<const N: usize> {
    pub averages: TimeAverages,
    /// Time average of the caller's extra observable.
    pub extra: f64,
    pub stderr_proxy: f64,
    pub last: [f64; N],
    pub stats: IntegratorStats,
}

/// Runs `f` from `y0` (rescaled frame) and averages the transport monomials
/// of the leading three components over `[t_transient, t_end]`, original time.
pub(crate) fn averaged_run<F, G, const N: usize>(
    f: F,
    y0: [f64; N],
    scale: &Rescaling,
    t_end: f64,
    t_transient: f64,
    opts: &IntegratorOptions,
    extra: G,
) -> Result<AveragedRun<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    G: Fn(&[f64; N]) -> f64,
{
    if !(t_end > t_transient && t_transient >= 0.0) {
        return Err(Error::Domain(format!("need t_end > t_transient >= 0, got {t_end}, {t_transient}")));
    }
    let (tau_tr, tau_end) = (scale.tau(t_transient), scale.tau(t_end));
    let mut opts = *opts;
    opts.divergence_limit *= scale.eps;

    let (y_tr, mut stats) = integrate_to(&f, 0.0, y0, tau_tr, &opts)?;

    let width = (tau_end - tau_tr) / BLOCKS as f64;
    let mut sums = [0.0_f64; 8];
    let mut block_xy = [0.0_f64; BLOCKS];
    let mut last = y_tr;
    let monomials = |y: &[f64; N]| -> [f64; 8] {
        let x = scale.x(y[0]);
        let yy = scale.y(y[1]);
        let z = scale.z(y[2]);
        let xy = x * yy;
        [x * x, xy, z, xy * z, z * z, xy * z * z, z * z * z, extra(y)]
    };
    for b in 0..BLOCKS {
        let t0 = tau_tr + b as f64 * width;
        let t1 = if b + 1 == BLOCKS { tau_end } else { t0 + width };
        let s = integrate_with(&f, t0, last, t1, &opts, |step| {
            let (m0, mm, m1) = (monomials(&step.y0), monomials(&step.midpoint()), monomials(&step.y1));
            let h = step.h() / 6.0;
            for i in 0..8 {
                sums[i] += h * (m0[i] + 4.0 * mm[i] + m1[i]);
            }
            block_xy[b] += h * (m0[1] + 4.0 * mm[1] + m1[1]);
            last = step.y1;
            ControlFlow::Continue(())
        })?;
        stats.steps += s.steps;
        stats.rejected_steps += s.rejected_steps;
        stats.rhs_evaluations += s.rhs_evaluations;
        stats.max_error_estimate = stats.max_error_estimate.max(s.max_error_estimate);
    }
    let span = tau_end - tau_tr;
    let avg = sums.map(|s| s / span);
    let averages = TimeAverages {
        x2: avg[0],
        xy: avg[1],
        z: avg[2],
        xyz: avg[3],
        z2: avg[4],
        xyz2: avg[5],
        z3: avg[6],
        span: t_end - t_transient,
    };
    let means = block_xy.map(|s| s / width);
    let mean = means.iter().sum::<f64>() / BLOCKS as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (BLOCKS - 1) as f64;
    Ok(AveragedRun { averages, extra: avg[7], stderr_proxy: (var / BLOCKS as f64).sqrt(), last, stats })
}

/// Measures `<XY>` over `[t_transient, t_end]` (original time). The run is
/// integrated in the rescaled frame; `opts` tolerances refer to it.
pub fn measure_transport(
    params: &Params,
    x0: &State3,
    t_end: f64,
    t_transient: f64,
    opts: &IntegratorOptions,
) -> Result<TransportMeasurement> {
    let scale = Rescaling::from_params(params)?;
    let y0 = match x0.frame {
        Frame::Original => scale.to_rescaled(x0)?.v,
        Frame::Rescaled => x0.v,
    };
    let (sigma, beta, eps) = (params.sigma(), params.beta(), scale.eps);
    let run = averaged_run(|_, y: &[f64; 3]| rescaled(y, eps, sigma, beta), y0, &scale, t_end, t_transient, opts, |_| 0.0)?;
    let last = run.last;
    Ok(TransportMeasurement {
        h: run.averages.xy,
        beta_avg_z: beta * run.averages.z,
        stderr_proxy: run.stderr_proxy,
        averages: run.averages,
        final_state: scale.to_original(&State3::rescaled(last[0], last[1], last[2]))?,
        stats: run.stats,
    })
}

/// Invariants sampled along a rescaled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct AbProjection {
    pub times: Vec<f64>,
    pub pairs: Vec<ConservedPair>,
    /// Times where `A - B` changes sign.
    pub diagonal_crossings: Vec<f64>,
}

impl AbProjection {
    pub fn regions(&self) -> Vec<Region> {
        self.pairs.iter().map(|p| classify_region(p, DEFAULT_REGION_TOL)).collect()
    }
}

pub fn ab_projection(traj: &Trajectory<3>) -> Result<AbProjection> {
    if traj.frame != Frame::Rescaled {
        return Err(Error::Frame("ab_projection needs a rescaled trajectory".into()));
    }
    let pairs = traj
        .states
        .iter()
        .map(|y| conserved(&State3::rescaled(y[0], y[1], y[2])))
        .collect::<Result<Vec<_>>>()?;
    let mut crossings = Vec::new();
    for i in 1..pairs.len() {
        let (d0, d1) = (pairs[i - 1].a - pairs[i - 1].b, pairs[i].a - pairs[i].b);
        if d0 * d1 < 0.0 {
            let w = d0 / (d0 - d1);
            crossings.push(traj.times[i - 1] + w * (traj.times[i] - traj.times[i - 1]));
        }
    }
    Ok(AbProjection { times: traj.times.clone(), pairs, diagonal_crossings: crossings })
}
