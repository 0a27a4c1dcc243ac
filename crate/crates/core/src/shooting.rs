//! Periodic orbits of the perturbed system by Poincaré shooting, and their
//! Floquet multipliers.

use std::ops::ControlFlow;

use log::{debug, warn};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::melnikov::{Branch, BranchPoint, Params};
use crate::odesim::{
    integrate_to, integrate_with, rescaled, rescaled_jacobian, stenflo_rescaled, stenflo_rescaled_jacobian,
    IntegratorOptions, Step, Trajectory,
};
use crate::orbits::{Frame, OrbitFamily, State3};

/// An autonomous vector field with its Jacobian.
pub trait VectorField<const N: usize> {
    fn eval(&self, y: &[f64; N]) -> [f64; N];
    fn jacobian(&self, y: &[f64; N]) -> [[f64; N]; N];
    /// Flow map and its derivative after time `t`.
    fn flow_jacobian(&self, y0: &[f64; N], t: f64, opts: &IntegratorOptions) -> Result<([f64; N], [[f64; N]; N])>;
}

/// The rescaled Lorenz field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaledLorenz {
    pub eps: f64,
    pub sigma: f64,
    pub beta: f64,
}

impl RescaledLorenz {
    pub fn from_params(p: &Params) -> Result<Self> {
        Ok(Self { eps: p.require_epsilon()?, sigma: p.sigma(), beta: p.beta() })
    }
}

impl VectorField<3> for RescaledLorenz {
    fn eval(&self, y: &[f64; 3]) -> [f64; 3] {
        rescaled(y, self.eps, self.sigma, self.beta)
    }

    fn jacobian(&self, y: &[f64; 3]) -> [[f64; 3]; 3] {
        rescaled_jacobian(y, self.eps, self.sigma, self.beta)
    }

    fn flow_jacobian(&self, y0: &[f64; 3], t: f64, opts: &IntegratorOptions) -> Result<([f64; 3], [[f64; 3]; 3])> {
        variational::<_, 3, 12>(self, y0, t, opts)
    }
}

/// The rescaled Lorenz–Stenflo field with rotation `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaledStenflo {
    pub eps: f64,
    pub sigma: f64,
    pub beta: f64,
    pub s: f64,
}

impl RescaledStenflo {
    pub fn from_params(p: &Params, s: f64) -> Result<Self> {
        Ok(Self { eps: p.require_epsilon()?, sigma: p.sigma(), beta: p.beta(), s })
    }
}

impl VectorField<4> for RescaledStenflo {
    fn eval(&self, y: &[f64; 4]) -> [f64; 4] {
        stenflo_rescaled(y, self.eps, self.sigma, self.beta, self.s)
    }

    fn jacobian(&self, y: &[f64; 4]) -> [[f64; 4]; 4] {
        stenflo_rescaled_jacobian(y, self.eps, self.sigma, self.beta, self.s)
    }

    fn flow_jacobian(&self, y0: &[f64; 4], t: f64, opts: &IntegratorOptions) -> Result<([f64; 4], [[f64; 4]; 4])> {
        variational::<_, 4, 20>(self, y0, t, opts)
    }
}

/// Integrates the state together with its variational equations; `M` must
/// equal `N + N * N`.
fn variational<F, const N: usize, const M: usize>(
    field: &F,
    y0: &[f64; N],
    t: f64,
    opts: &IntegratorOptions,
) -> Result<([f64; N], [[f64; N]; N])>
where
    F: VectorField<N> + ?Sized,
{
    assert_eq!(M, N + N * N);
    let mut z0 = [0.0; M];
    z0[..N].copy_from_slice(y0);
    for i in 0..N {
        z0[N + i * N + i] = 1.0;
    }
    let rhs = |_: f64, z: &[f64; M]| -> [f64; M] {
        let y: [f64; N] = std::array::from_fn(|i| z[i]);
        let f = field.eval(&y);
        let j = field.jacobian(&y);
        let mut out = [0.0; M];
        out[..N].copy_from_slice(&f);
        for r in 0..N {
            for c in 0..N {
                out[N + r * N + c] = (0..N).map(|k| j[r][k] * z[N + k * N + c]).sum();
            }
        }
        out
    };
    let (z, _) = integrate_to(rhs, 0.0, z0, t, opts)?;
    let y = std::array::from_fn(|i| z[i]);
    let m = std::array::from_fn(|r| std::array::from_fn(|c| z[N + r * N + c]));
    Ok((y, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Section function increasing.
    Positive,
    Negative,
    Both,
}

impl Direction {
    fn accepts(self, g0: f64, g1: f64) -> bool {
        match self {
            Self::Positive => g0 < 0.0 && g1 >= 0.0,
            Self::Negative => g0 > 0.0 && g1 <= 0.0,
            Self::Both => (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0),
        }
    }
}

/// The hyperplane `normal . y = offset`, crossed in `direction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section<const N: usize = 3> {
    normal: [f64; N],
    offset: f64,
    pub direction: Direction,
}

impl<const N: usize> Section<N> {
    /// Normalises `normal`; rejects a zero vector.
    pub fn new(normal: [f64; N], offset: f64, direction: Direction) -> Result<Self> {
        let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("section normal must be nonzero".into()));
        }
        Ok(Self { normal: normal.map(|v| v / norm), offset: offset / norm, direction })
    }

    /// `eta = 0` crossed downward. On the unperturbed orbits this selects the
    /// point of largest `xi`, which is positive.
    pub fn eta_zero() -> Self {
        let mut normal = [0.0; N];
        normal[1] = 1.0;
        Self { normal, offset: 0.0, direction: Direction::Negative }
    }

    pub fn normal(&self) -> &[f64; N] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn eval(&self, y: &[f64; N]) -> f64 {
        (0..N).map(|i| self.normal[i] * y[i]).sum::<f64>() - self.offset
    }
}

fn bisect_step<const N: usize>(step: &Step<N>, sec: &Section<N>) -> (f64, [f64; N]) {
    let (mut a, mut b) = (step.t0, step.t1);
    let mut ga = sec.eval(&step.y0);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-12 * (1.0 + b.abs()) {
            break;
        }
        let mid = 0.5 * (a + b);
        let gm = sec.eval(&step.interpolate(mid));
        if (ga <= 0.0) == (gm <= 0.0) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    let t = 0.5 * (a + b);
    (t, step.interpolate(t))
}

/// Section crossings of an integration of `field` from `y0` over `[0, t_end]`.
pub fn crossings_along<F, const N: usize>(
    field: &F,
    y0: &[f64; N],
    t_end: f64,
    sec: &Section<N>,
    opts: &IntegratorOptions,
) -> Result<Vec<(f64, [f64; N])>>
where
    F: VectorField<N>,
{
    let mut out = Vec::new();
    integrate_with(|_, y| field.eval(y), 0.0, *y0, t_end, opts, |step| {
        if sec.direction.accepts(sec.eval(&step.y0), sec.eval(&step.y1)) {
            out.push(bisect_step(step, sec));
        }
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Crossings of a stored trajectory. Each bracketing interval is
/// re-integrated so the crossing time is located on the dense output.
pub fn section_crossings<F, const N: usize>(
    traj: &Trajectory<N>,
    sec: &Section<N>,
    field: &F,
    opts: &IntegratorOptions,
) -> Result<Vec<(f64, [f64; N])>>
where
    F: VectorField<N>,
{
    let mut out = Vec::new();
    for i in 1..traj.states.len() {
        let (g0, g1) = (sec.eval(&traj.states[i - 1]), sec.eval(&traj.states[i]));
        if !sec.direction.accepts(g0, g1) {
            continue;
        }
        let t0 = traj.times[i - 1];
        let mut found = None;
        integrate_with(|_, y| field.eval(y), t0, traj.states[i - 1], traj.times[i], opts, |step| {
            if found.is_none() && sec.direction.accepts(sec.eval(&step.y0), sec.eval(&step.y1)) {
                found = Some(bisect_step(step, sec));
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        })?;
        if let Some(c) = found {
            out.push(c);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    AsymmetricPlus,
    AsymmetricMinus,
    Unknown,
}

/// How the Newton iteration differentiates the flow map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianMethod {
    ForwardDifference,
    Variational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingOptions {
    pub tol: f64,
    pub max_iterations: usize,
    /// Forward-difference step relative to `max(1, |y|)`.
    pub fd_step: f64,
    pub jacobian: JacobianMethod,
    pub integrator: IntegratorOptions,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iterations: 25, fd_step: 1e-7,
            jacobian: JacobianMethod::Variational,
            integrator: IntegratorOptions::tolerances(1e-12, 1e-13) }
    }
}

/// A converged periodic orbit anchored on a section.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit<const N: usize = 3> {
    pub anchor: [f64; N],
    pub period: f64,
    pub section: Section<N>,
    /// Nontrivial multipliers, sorted by decreasing modulus.
    pub multipliers: Vec<Complex64>,
    /// The multiplier along the flow.
    pub trivial_multiplier: Option<Complex64>,
    pub symmetry: Symmetry,
    pub converged_residual: f64,
    pub iterations: usize,
}

impl<const N: usize> PeriodicOrbit<N> {
    pub fn anchor_state(&self) -> Option<State3> {
        (N >= 3).then(|| State3 { frame: Frame::Rescaled, v: [self.anchor[0], self.anchor[1], self.anchor[2]] })
    }

    /// Time averages of `g` over one period.
    pub fn averages<F, G, const K: usize>(&self, field: &F, g: G, opts: &IntegratorOptions) -> Result<[f64; K]>
    where
        F: VectorField<N>,
        G: Fn(&[f64; N]) -> [f64; K],
    {
        let mut sums = [0.0; K];
        integrate_with(|_, y| field.eval(y), 0.0, self.anchor, self.period, opts, |step| {
            let (a, m, b) = (g(&step.y0), g(&step.midpoint()), g(&step.y1));
            for i in 0..K {
                sums[i] += step.h() / 6.0 * (a[i] + 4.0 * m[i] + b[i]);
            }
            ControlFlow::Continue(())
        })?;
        Ok(sums.map(|s| s / self.period))
    }

    /// Samples `n` equally spaced points of the orbit.
    pub fn sample<F: VectorField<N>>(&self, field: &F, n: usize, opts: &IntegratorOptions) -> Result<Vec<[f64; N]>> {
        let mut out = Vec::with_capacity(n);
        let dt = self.period / n as f64;
        let mut next = 0.0;
        out.push(self.anchor);
        integrate_with(|_, y| field.eval(y), 0.0, self.anchor, self.period, opts, |step| {
            while next + dt < step.t1 && out.len() < n {
                next += dt;
                out.push(step.interpolate(next));
            }
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }
}

fn norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual<F, const N: usize>(
    field: &F,
    x: &[f64; N],
    t: f64,
    sec: &Section<N>,
    opts: &IntegratorOptions,
) -> Result<(Vec<f64>, [f64; N])>
where
    F: VectorField<N>,
{
    let (y, _) = integrate_to(|_, y| field.eval(y), 0.0, *x, t, opts)?;
    let mut r: Vec<f64> = (0..N).map(|i| y[i] - x[i]).collect();
    r.push(sec.eval(x));
    Ok((r, y))
}

fn vnorm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Newton iteration for `flow(x, T) = x` with `x` on the section.
pub fn refine_periodic<F, const N: usize>(
    field: &F,
    guess: &[f64; N],
    period_guess: f64,
    sec: &Section<N>,
    opts: &ShootingOptions,
) -> Result<PeriodicOrbit<N>>
where
    F: VectorField<N>,
{
    if !(period_guess > 0.0) || guess.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("shooting needs a finite guess and a positive period".into()));
    }
    let mut x = *guess;
    let mut t = period_guess;
    let (mut r, mut y) = residual(field, &x, t, sec, &opts.integrator)?;
    let mut rn = vnorm(&r);
    let mut best = rn;
    for it in 0..opts.max_iterations {
        debug!("shooting iteration {it}: residual {rn:e}, period {t}");
        if rn <= opts.tol {
            return finish(field, x, t, sec, rn, it, opts);
        }
        let mut jac = DMatrix::<f64>::zeros(N + 1, N + 1);
        match opts.jacobian {
            JacobianMethod::ForwardDifference => {
                let h_base = opts.fd_step * norm(&x).max(1.0);
                for j in 0..N {
                    let mut xp = x;
                    xp[j] += h_base;
                    let h = xp[j] - x[j];
                    let (yp, _) = integrate_to(|_, y| field.eval(y), 0.0, xp, t, &opts.integrator)?;
                    for i in 0..N {
                        jac[(i, j)] = (yp[i] - y[i]) / h;
                    }
                }
            }
            JacobianMethod::Variational => {
                let (_, m) = field.flow_jacobian(&x, t, &opts.integrator)?;
                for i in 0..N {
                    for j in 0..N {
                        jac[(i, j)] = m[i][j];
                    }
                }
            }
        }
        for j in 0..N {
            jac[(j, j)] -= 1.0;
            jac[(N, j)] = sec.normal[j];
        }
        let fy = field.eval(&y);
        for i in 0..N {
            jac[(i, N)] = fy[i];
        }
        let rhs = -DVector::from_vec(r.clone());
        let delta = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NoConvergence { iterations: it, residual: best })?;
        let mut damping = 1.0;
        let mut accepted = None;
        for _ in 0..2 {
            let xn: [f64; N] = std::array::from_fn(|i| x[i] + damping * delta[i]);
            let tn = t + damping * delta[N];
            if tn > 0.0 {
                if let Ok((rr, yy)) = residual(field, &xn, tn, sec, &opts.integrator) {
                    let nn = vnorm(&rr);
                    if nn.is_finite() && (nn < rn || damping < 1.0) {
                        accepted = Some((xn, tn, rr, yy, nn));
                        break;
                    }
                }
            }
            damping *= 0.5;
        }
        let Some((xn, tn, rr, yy, nn)) = accepted else {
            return Err(Error::NoConvergence { iterations: it + 1, residual: best });
        };
        x = xn;
        t = tn;
        r = rr;
        y = yy;
        rn = nn;
        best = best.min(rn);
    }
    if rn <= opts.tol {
        return finish(field, x, t, sec, rn, opts.max_iterations, opts);
    }
    Err(Error::NoConvergence { iterations: opts.max_iterations, residual: best })
}

fn finish<F, const N: usize>(
    field: &F,
    anchor: [f64; N],
    period: f64,
    sec: &Section<N>,
    residual: f64,
    iterations: usize,
    opts: &ShootingOptions,
) -> Result<PeriodicOrbit<N>>
where
    F: VectorField<N>,
{
    let mut orbit = PeriodicOrbit {
        anchor,
        period,
        section: *sec,
        multipliers: Vec::new(),
        trivial_multiplier: None,
        symmetry: Symmetry::Unknown,
        converged_residual: residual,
        iterations,
    };
    let samples = orbit.sample(field, 256, &opts.integrator)?;
    let (min, max) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y[0]), b.max(y[0])));
    orbit.symmetry = if min < 0.0 && max > 0.0 {
        Symmetry::Symmetric
    } else if min > 0.0 {
        Symmetry::AsymmetricPlus
    } else {
        Symmetry::AsymmetricMinus
    };
    Ok(orbit)
}

/// Monodromy matrix and multipliers of a converged orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct Monodromy<const N: usize> {
    pub matrix: [[f64; N]; N],
    /// All eigenvalues of the monodromy matrix.
    pub eigenvalues: Vec<Complex64>,
    /// The eigenvalue closest to one.
    pub trivial: Complex64,
    /// Multipliers of the linearised return map on the section, by
    /// decreasing modulus.
    pub nontrivial: Vec<Complex64>,
}

fn eigenvalues<const N: usize>(m: &[[f64; N]; N]) -> Vec<Complex64> {
    let mat = DMatrix::<f64>::from_fn(N, N, |r, c| m[r][c]);
    mat.complex_eigenvalues().iter().map(|z| Complex64::new(z.re, z.im)).collect()
}

pub fn monodromy<F, const N: usize>(orbit: &PeriodicOrbit<N>, field: &F, opts: &IntegratorOptions) -> Result<Monodromy<N>>
where
    F: VectorField<N>,
{
    let (_, m) = field.flow_jacobian(&orbit.anchor, orbit.period, opts)?;
    let eig = eigenvalues(&m);
    let trivial = *eig
        .iter()
        .min_by(|a, b| (*a - 1.0).norm().total_cmp(&(*b - 1.0).norm()))
        .ok_or_else(|| Error::Domain("empty spectrum".into()))?;

    // Return map derivative (I - f n^T / (n.f)) M, whose spectrum is the
    // nontrivial multipliers plus zero.
    let f = field.eval(&orbit.anchor);
    let n = orbit.section.normal;
    let nf: f64 = (0..N).map(|i| n[i] * f[i]).sum();
    if nf.abs() < 1e-12 * norm(&f) {
        warn!("flow is nearly tangent to the section; multipliers may be inaccurate");
    }
    let p: [[f64; N]; N] = std::array::from_fn(|r| {
        std::array::from_fn(|c| (0..N).map(|k| ((r == k) as u8 as f64 - f[r] * n[k] / nf) * m[k][c]).sum())
    });
    let mut nontrivial = eigenvalues(&p);
    let zero = nontrivial
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    nontrivial.remove(zero);
    nontrivial.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.im.total_cmp(&a.im)));
    if (trivial - 1.0).norm() > 1e-5 {
        warn!("trivial multiplier {trivial} is not close to one");
    }
    Ok(Monodromy { matrix: m, eigenvalues: eig, trivial, nontrivial })
}

/// Refines an orbit and attaches its multipliers.
pub fn refine_with_multipliers<F, const N: usize>(
    field: &F,
    guess: &[f64; N],
    period_guess: f64,
    sec: &Section<N>,
    opts: &ShootingOptions,
) -> Result<PeriodicOrbit<N>>
where
    F: VectorField<N>,
{
    let mut orbit = refine_periodic(field, guess, period_guess, sec, opts)?;
    let mono = monodromy(&orbit, field, &opts.integrator)?;
    orbit.multipliers = mono.nontrivial;
    orbit.trivial_multiplier = Some(mono.trivial);
    Ok(orbit)
}

/// Point of an unperturbed orbit on `sec`, with the orbit's minimal period.
pub fn seed_on_section(family: &OrbitFamily, sec: &Section<3>) -> Result<([f64; 3], f64)> {
    let period = family.minimal_period()?;
    let n = 512;
    let g = |tau: f64| -> Result<f64> { Ok(sec.eval(&family.eval(tau)?.v)) };
    let mut g0 = g(0.0)?;
    for i in 1..=n {
        let t1 = period * i as f64 / n as f64;
        let g1 = g(t1)?;
        if sec.direction.accepts(g0, g1) {
            let (mut a, mut b, mut ga) = (period * (i - 1) as f64 / n as f64, t1, g0);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let gm = g(mid)?;
                if (ga <= 0.0) == (gm <= 0.0) {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            return Ok((family.eval(0.5 * (a + b))?.v, period));
        }
        g0 = g1;
    }
    Err(Error::Domain("unperturbed orbit does not cross the section".into()))
}

/// Refines the Lorenz orbit seeded by a Melnikov branch point.
pub fn refine_from_branch(bp: &BranchPoint, params: &Params, opts: &ShootingOptions) -> Result<PeriodicOrbit<3>> {
    let field = RescaledLorenz::from_params(params)?;
    let sec = Section::eta_zero();
    let (guess, period) = seed_on_section(&bp.family()?, &sec)?;
    refine_with_multipliers(&field, &guess, period, &sec, opts)
}

/// `(tr, det)` of the Melnikov matrix scaled to the minimal period of the
/// branch's orbit. The asymmetric family's elliptic period covers the orbit
/// twice.
pub fn dm_per_revolution(bp: &BranchPoint) -> (f64, f64) {
    match bp.branch {
        Branch::Symmetric => (bp.tr_dm, bp.det_dm),
        Branch::Asymmetric => (0.5 * bp.tr_dm, 0.25 * bp.det_dm),
    }
}

/// Refines a Lorenz orbit from a rescaled-frame guess.
pub fn refine_orbit(guess: &State3, period_guess: f64, params: &Params, opts: &ShootingOptions) -> Result<PeriodicOrbit<3>> {
    guess.require(Frame::Rescaled)?;
    let field = RescaledLorenz::from_params(params)?;
    refine_with_multipliers(&field, &guess.v, period_guess, &Section::eta_zero(), opts)
}
