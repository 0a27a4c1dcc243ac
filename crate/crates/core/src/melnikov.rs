//! Melnikov conditions for the persistence of periodic orbits, their
//! stability data and the homoclinic jump diagnostics.

use num_complex::Complex64;

use crate::elliptic::{complete, find_kstar, ke_combination, EllipticModulus};
use crate::error::{Error, Result};
use crate::orbits::{OrbitFamily, OrbitTag, Sign};
use crate::quadrature;

/// Prandtl number `sigma`, geometry `beta` and optionally the Rayleigh
/// number `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    sigma: f64,
    beta: f64,
    rho: Option<f64>,
}

impl Params {
    pub fn new(sigma: f64, beta: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("need sigma, beta > 0, got ({sigma}, {beta})")));
        }
        Ok(Self { sigma, beta, rho: None })
    }

    /// Parameters with `sigma = lambda (beta + 2) - 1`.
    pub fn from_lambda(lambda: f64, beta: f64) -> Result<Self> {
        Self::new(lambda * (beta + 2.0) - 1.0, beta)
    }

    pub fn with_rho(mut self, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!("need rho > 0, got {rho}")));
        }
        self.rho = Some(rho);
        Ok(self)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho(&self) -> Option<f64> {
        self.rho
    }

    /// `lambda = (sigma + 1) / (beta + 2)`.
    pub fn lambda(&self) -> f64 {
        (self.sigma + 1.0) / (self.beta + 2.0)
    }

    /// `epsilon = rho^(-1/2)`, if `rho` is set.
    pub fn epsilon(&self) -> Option<f64> {
        self.rho.map(|r| 1.0 / r.sqrt())
    }

    pub fn require_epsilon(&self) -> Result<f64> {
        self.epsilon().ok_or_else(|| Error::Domain("rho is required".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Symmetric,
    Asymmetric,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Symmetric => "symmetric",
            Branch::Asymmetric => "asymmetric",
        }
    }
}

/// Solved Melnikov data at one `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub branch: Branch,
    pub lambda: f64,
    pub k: f64,
    pub modulus: EllipticModulus,
    pub b: f64,
    pub a: f64,
    /// Relative residuals of `(M1~, M3)`.
    pub residuals: [f64; 2],
    pub tr_dm: f64,
    pub det_dm: f64,
    pub transport_h: Option<f64>,
}

impl BranchPoint {
    pub fn family(&self) -> Result<OrbitFamily> {
        match self.branch {
            Branch::Symmetric => OrbitFamily::l1_from_modulus(self.modulus, self.b),
            Branch::Asymmetric => OrbitFamily::l2_from_modulus(self.modulus, self.b, Sign::Plus),
        }
    }
}

pub const RESIDUAL_TOL: f64 = 1e-9;

fn kstar_bound(md: &EllipticModulus) -> Result<(f64, f64)> {
    let (kk, ee) = complete(md)?;
    if kk - 2.0 * ee <= 0.0 {
        return Err(Error::Domain(format!("k1 = {} not above k*", md.k())));
    }
    Ok((kk, ee))
}

/// Right side of the symmetric branch equation `2 lambda - 1 = rhs_sym(k1)`.
pub fn rhs_sym(k1: f64) -> Result<f64> {
    rhs_sym_modulus(&EllipticModulus::new(k1)?)
}

pub fn rhs_sym_modulus(md: &EllipticModulus) -> Result<f64> {
    let (kk, ee) = kstar_bound(md)?;
    let (m, m1) = (md.m(), md.complement());
    Ok(kk * (m1 * kk + (2.0 * m - 1.0) * ee) / (3.0 * (kk - 2.0 * ee) * (ee - m1 * kk)))
}

/// Right side of the asymmetric branch equation `2 lambda - 1 = rhs_asym(k2)`.
pub fn rhs_asym(k2: f64) -> Result<f64> {
    if k2 == 0.0 {
        return Ok(1.0);
    }
    if k2 == 1.0 {
        return Ok(1.0 / 3.0);
    }
    rhs_asym_modulus(&EllipticModulus::new(k2)?)
}

pub fn rhs_asym_modulus(md: &EllipticModulus) -> Result<f64> {
    if md.m() == 0.0 {
        return Ok(1.0);
    }
    if md.complement() == 0.0 {
        return Ok(1.0 / 3.0);
    }
    let (kk, ee) = complete(md)?;
    // (2 - m)E - 2(1 - m)K and (2 - m)K - 2E, both O(m^2)
    let num = ke_combination(&[-2.0, 2.0], &[2.0, -1.0], md)?;
    let den = ke_combination(&[2.0, -1.0], &[-2.0], md)?;
    Ok(kk * num / (3.0 * ee * den))
}

fn sym_b(md: &EllipticModulus, p: &Params) -> Result<f64> {
    let (kk, ee) = complete(md)?;
    let (m, m1) = (md.m(), md.complement());
    let e1 = m1 * kk + (2.0 * m - 1.0) * ee;
    let e2 = (4.0 * m - 1.0) * kk + 4.0 * (1.0 - 2.0 * m) * ee;
    Ok(3.0 * p.beta * p.sigma * (kk - 2.0 * ee) / (4.0 * e1 + p.beta * e2))
}

fn asym_b(md: &EllipticModulus, p: &Params) -> Result<f64> {
    let (kk, ee) = complete(md)?;
    let den = ke_combination(&[2.0, -1.0], &[-2.0], md)?;
    Ok(p.beta * p.sigma * kk * md.m() / (4.0 * p.sigma * ee + p.beta * den))
}

/// Solves `f(s) = target` for decreasing `f` on `(lo, hi)`; values that are
/// not finite count as `+inf`.
fn bisect_decreasing<F>(f: F, mut lo: f64, mut hi: f64, target: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    for _ in 0..400 {
        let mid = if lo > 0.0 && hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
            break;
        }
        let v = f(mid);
        if !v.is_finite() || v > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const S_MAX: f64 = 1400.0;

/// Solves the symmetric branch at the `lambda` of `params`.
pub fn solve_sym_branch(params: &Params) -> Result<BranchPoint> {
    let lambda = params.lambda();
    if lambda <= 2.0 / 3.0 {
        return Err(Error::NoBranch { branch: "symmetric", lambda });
    }
    let target = 2.0 * lambda - 1.0;
    let f = |s: f64| {
        EllipticModulus::from_log_complement(s)
            .and_then(|md| rhs_sym_modulus(&md))
            .unwrap_or(f64::INFINITY)
    };
    let kstar = find_kstar();
    let s_lo = -((1.0 - kstar) * (1.0 + kstar)).ln();
    let mut s_hi = 2.0 * s_lo;
    while f(s_hi) > target {
        s_hi *= 2.0;
        if s_hi > S_MAX {
            return Err(Error::Bracket("symmetric branch (lambda too close to 2/3)"));
        }
    }
    let s = bisect_decreasing(f, s_lo, s_hi, target);
    let md = EllipticModulus::from_log_complement(s)?;
    let b = sym_b(&md, params)?;
    finish_branch_point(Branch::Symmetric, md, b, params)
}

/// Solves the asymmetric branch at the `lambda` of `params`.
pub fn solve_asym_branch(params: &Params) -> Result<BranchPoint> {
    let lambda = params.lambda();
    if lambda <= 2.0 / 3.0 || lambda >= 1.0 {
        return Err(Error::NoBranch { branch: "asymmetric", lambda });
    }
    let target = 2.0 * lambda - 1.0;
    let f = |s: f64| {
        EllipticModulus::from_log_complement(s)
            .and_then(|md| rhs_asym_modulus(&md))
            .unwrap_or(f64::NAN)
    };
    let s_lo = 1e-14;
    if f(s_lo) <= target {
        return Err(Error::Bracket("asymmetric branch (lambda too close to 1)"));
    }
    let mut s_hi = 1.0;
    while f(s_hi) > target {
        s_hi *= 2.0;
        if s_hi > S_MAX {
            return Err(Error::Bracket("asymmetric branch (lambda too close to 2/3)"));
        }
    }
    let s = bisect_decreasing(f, s_lo, s_hi, target);
    let md = EllipticModulus::from_log_complement(s)?;
    let b = asym_b(&md, params)?;
    finish_branch_point(Branch::Asymmetric, md, b, params)
}

pub fn solve_branch(branch: Branch, params: &Params) -> Result<BranchPoint> {
    match branch {
        Branch::Symmetric => solve_sym_branch(params),
        Branch::Asymmetric => solve_asym_branch(params),
    }
}

fn finish_branch_point(
    branch: Branch,
    md: EllipticModulus,
    b: f64,
    params: &Params,
) -> Result<BranchPoint> {
    let terms = closed_terms(branch, &md, b, params)?;
    let residuals = [terms.m1 / terms.scale1, terms.m3 / terms.scale3];
    let a = match branch {
        Branch::Symmetric => b * (1.0 - 2.0 * md.complement()),
        Branch::Asymmetric => b * (2.0 / md.m() - 1.0),
    };
    let mut bp = BranchPoint {
        branch,
        lambda: params.lambda(),
        k: md.k(),
        modulus: md,
        b,
        a,
        residuals,
        tr_dm: f64::NAN,
        det_dm: f64::NAN,
        transport_h: None,
    };
    let (tr, det) = trace_det(&bp, params)?;
    bp.tr_dm = tr;
    bp.det_dm = det;
    Ok(bp)
}

/// Melnikov values with the sum of absolute values of their terms.
#[derive(Debug, Clone, Copy)]
struct Terms {
    m1: f64,
    scale1: f64,
    m3: f64,
    scale3: f64,
}

fn sum_terms(t: &[f64]) -> (f64, f64) {
    (t.iter().sum(), t.iter().map(|x| x.abs()).sum())
}

fn closed_terms(branch: Branch, md: &EllipticModulus, b: f64, p: &Params) -> Result<Terms> {
    let (kk, ee) = complete(md)?;
    let (m, m1) = (md.m(), md.complement());
    let (sigma, beta) = (p.sigma, p.beta);
    let sb = b.sqrt();
    let k_minus_e = ke_combination(&[1.0], &[-1.0], md)?;
    let quartic = ke_combination(&[2.0, 1.0], &[-2.0, -2.0], md)?;
    let (t1, t3) = match branch {
        Branch::Symmetric => (
            vec![
                (b * beta + beta * sigma) * 4.0 * kk / sb,
                -16.0 * sigma * sb * (ee - m1 * kk),
                -8.0 * beta * sb * k_minus_e,
            ],
            vec![
                -(b + sigma) * beta * 4.0 * kk / sb,
                8.0 * (2.0 * (beta - 1.0) * sb + sigma * beta / sb) * k_minus_e,
                -16.0 * (beta - 1.0) * sb / 3.0 * quartic,
            ],
        ),
        Branch::Asymmetric => {
            let k = md.k();
            let pre = 4.0 * k / sb;
            (
                vec![
                    pre * beta * sigma * kk,
                    -pre * 4.0 * sigma * b * ee / m,
                    pre * beta * b * (kk - 2.0 * k_minus_e / m),
                ],
                vec![
                    -beta * k * (b + sigma) * 4.0 * kk / sb,
                    8.0 / sb * (beta * sigma + 2.0 * (beta - 1.0) * b) * k_minus_e / k,
                    -16.0 * (beta - 1.0) * sb * quartic / (3.0 * k * m),
                ],
            )
        }
    };
    let (v1, s1) = sum_terms(&t1);
    let (v3, s3) = sum_terms(&t3);
    Ok(Terms { m1: v1, scale1: s1, m3: v3, scale3: s3 })
}

/// Closed-form `(M1~, M3)` over one symmetric orbit `(k1, B)`.
pub fn melnikov_closed_sym(k1: f64, b: f64, params: &Params) -> Result<(f64, f64)> {
    check_b(b)?;
    let t = closed_terms(Branch::Symmetric, &EllipticModulus::new(k1)?, b, params)?;
    Ok((t.m1, t.m3))
}

/// Closed-form `(M1~, M3)` over an asymmetric orbit `(k2, B)`, integrated
/// over the period `4 K k2 / sqrt(B)`.
pub fn melnikov_closed_asym(k2: f64, b: f64, params: &Params) -> Result<(f64, f64)> {
    check_b(b)?;
    let t = closed_terms(Branch::Asymmetric, &EllipticModulus::new(k2)?, b, params)?;
    Ok((t.m1, t.m3))
}

pub fn melnikov_closed(branch: Branch, md: &EllipticModulus, b: f64, params: &Params) -> Result<(f64, f64)> {
    check_b(b)?;
    let t = closed_terms(branch, md, b, params)?;
    Ok((t.m1, t.m3))
}

fn check_b(b: f64) -> Result<()> {
    if b > 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("B = {b} must be positive")))
    }
}

/// `(M1~, M3)` by quadrature of `A'` and `B'` (divided by `epsilon`) along the
/// closed-form orbit over the period of [`crate::orbits::period_action_frequency`].
pub fn melnikov_quadrature(family: &OrbitFamily, params: &Params) -> Result<(f64, f64)> {
    if !matches!(family.tag, OrbitTag::L1 | OrbitTag::L2Plus | OrbitTag::L2Minus) {
        return Err(Error::Domain(format!("{:?} is not periodic", family.tag)));
    }
    let t = crate::orbits::period_action_frequency(family)?.period;
    let (sigma, beta) = (params.sigma, params.beta);
    let b = family.params.b;
    let [m1, m3] = quadrature::periodic_vec(
        |tau| match family.eval(tau) {
            Ok(s) => {
                let [xi, _, zeta] = s.v;
                [
                    -sigma * xi * xi + beta * zeta + beta * sigma,
                    -(b + (beta - 1.0) * zeta * zeta / b + beta * sigma * zeta / b),
                ]
            }
            Err(_) => [f64::NAN; 2],
        },
        0.0,
        t,
        1e-13,
    )?;
    Ok((m1, m3))
}

/// Pieces of the trace/determinant assembly of the averaged return map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmAssembly {
    /// Closed-form trace.
    pub trace: f64,
    /// Trace assembled from finite differences of the Melnikov functions.
    pub trace_fd: f64,
    pub det: f64,
}

/// Richardson-extrapolated central difference.
fn derivative<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    let (d1, d2) = (d(h)?, d(0.5 * h)?);
    let v = (4.0 * d2 - d1) / 3.0;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::FiniteDifference(format!("non-finite derivative at {x}")))
    }
}

pub fn dm_assembly(bp: &BranchPoint, params: &Params) -> Result<DmAssembly> {
    let md = bp.modulus;
    let b = bp.b;
    let sb = b.sqrt();
    let (kk, ee) = complete(&md)?;
    let (m, m1) = (md.m(), md.complement());
    let k = md.k();
    let s = md.log_complement();
    let (sigma, beta) = (params.sigma, params.beta);

    // T, dI/ds at fixed B, dI/dB at fixed A and at fixed k.
    let (period, di_ds, di_db_a, di_db_k, trace) = match bp.branch {
        Branch::Symmetric => (
            4.0 * kk / sb,
            8.0 * sb * kk * m1,
            4.0 * (2.0 * ee - kk) / sb,
            8.0 * (ee - m1 * kk) / sb,
            -4.0 * kk * (1.0 + beta + sigma) / sb,
        ),
        Branch::Asymmetric => (
            4.0 * kk * k / sb,
            -8.0 * sb * kk * m1 / (m * k),
            -4.0 * ke_combination(&[2.0, -1.0], &[-2.0], &md)? / (k * sb),
            8.0 * ee / (k * sb),
            -4.0 * kk * k * (1.0 + beta + sigma) / sb,
        ),
    };

    let branch = bp.branch;
    let eval = |s: f64, b: f64| -> Result<(f64, f64)> {
        let md = EllipticModulus::from_log_complement(s)?;
        let t = closed_terms(branch, &md, b, params)?;
        Ok((t.m1, t.m3))
    };
    let hs = 1e-3 * s.max(1e-300);
    let hb = 1e-3 * b;
    let m1_s = derivative(|x| eval(x, b).map(|v| v.0), s, hs)?;
    let m3_s = derivative(|x| eval(x, b).map(|v| v.1), s, hs)?;
    let m1_b = derivative(|x| eval(s, x).map(|v| v.0), b, hb)?;
    let m3_b = derivative(|x| eval(s, x).map(|v| v.1), b, hb)?;

    let trace_fd = (period * m1_s + di_db_a * m3_s) / di_ds + m3_b - m3_s * di_db_k / di_ds;
    let det = period / di_ds * (m1_s * m3_b - m1_b * m3_s);
    Ok(DmAssembly { trace, trace_fd, det })
}

/// `(tr DM, det DM)`: closed-form trace, finite-difference determinant.
pub fn trace_det(bp: &BranchPoint, params: &Params) -> Result<(f64, f64)> {
    let d = dm_assembly(bp, params)?;
    Ok((d.trace, d.det))
}

/// Predicted nontrivial Floquet multipliers `1 + (eps/2)(tr +- sqrt(tr^2 - 4 det))`.
pub fn floquet_prediction(tr: f64, det: f64, epsilon: f64) -> (Complex64, Complex64) {
    let disc = Complex64::new(tr * tr - 4.0 * det, 0.0).sqrt();
    let half = 0.5 * epsilon;
    (1.0 + half * (tr + disc), 1.0 + half * (tr - disc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Saddle,
    Unstable,
}

pub fn stability_verdict(nu: (Complex64, Complex64)) -> Stability {
    match (nu.0.norm() < 1.0, nu.1.norm() < 1.0) {
        (true, true) => Stability::Stable,
        (false, false) => Stability::Unstable,
        _ => Stability::Saddle,
    }
}

/// Jump integrals along the homoclinic loop of the saddle `(0, 0, -sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomoclinicJumps {
    /// Closed form of the B-jump integral, `-(4/3)(beta + 2) sigma^(3/2) eps`.
    pub delta_b2: f64,
    /// Closed form of the A-jump integral, `4 eps (beta - 2 sigma) sigma^(3/2)`.
    pub delta_a2: f64,
    pub quad_b2: f64,
    pub quad_a2: f64,
    /// The `sigma` at which the two jumps coincide for this `beta`.
    pub sigma_equal: f64,
    /// `lambda` at `sigma_equal`; the homoclinic locus tends here as `eps -> 0`.
    pub lambda_hom_limit: f64,
}

pub fn homoclinic_closed(sigma: f64, beta: f64, eps: f64) -> (f64, f64) {
    let s32 = sigma * sigma.sqrt();
    (-(4.0 / 3.0) * (beta + 2.0) * s32 * eps, 4.0 * eps * (beta - 2.0 * sigma) * s32)
}

pub fn homoclinic_jumps(params: &Params) -> Result<HomoclinicJumps> {
    let eps = params.require_epsilon()?;
    let (sigma, beta) = (params.sigma, params.beta);
    let (delta_b2, delta_a2) = homoclinic_closed(sigma, beta, eps);

    let fam = OrbitFamily::l3(sigma, Sign::Plus)?;
    let span = 40.0 / sigma.sqrt();
    let quad_b2 = quadrature::trapezoid(
        |tau| {
            let [_, eta, zeta] = fam.eval(tau).map(|s| s.v).unwrap_or([f64::NAN; 3]);
            -eps * (eta * eta + beta * zeta * zeta + beta * sigma * zeta)
        },
        -span,
        span,
        1e-14,
    )?;
    let quad_a2 = quadrature::trapezoid(
        |tau| {
            let [xi, _, zeta] = fam.eval(tau).map(|s| s.v).unwrap_or([f64::NAN; 3]);
            sigma * eps * (-sigma * xi * xi + beta * zeta + beta * sigma)
        },
        -span,
        span,
        1e-14,
    )?;

    // difference of the jumps is decreasing in sigma on (0, inf)
    let g = |s: f64| {
        let (b2, a2) = homoclinic_closed(s, beta, 1.0);
        (a2 - b2) / (s * s.sqrt())
    };
    let (mut lo, mut hi) = (1e-12, 1.0);
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma_equal = 0.5 * (lo + hi);
    Ok(HomoclinicJumps {
        delta_b2,
        delta_a2,
        quad_b2,
        quad_a2,
        sigma_equal,
        lambda_hom_limit: (sigma_equal + 1.0) / (beta + 2.0),
    })
}
