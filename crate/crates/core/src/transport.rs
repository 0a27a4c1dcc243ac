//! Leading-order time averages and transport along equilibria and the
//! persisting periodic orbits.

use crate::elliptic::{complete, find_kstar, ke_combination, EllipticModulus};
use crate::error::{Error, Result};
use crate::melnikov::{rhs_sym_modulus, solve_asym_branch, solve_sym_branch, Branch, BranchPoint, Params};

/// Transport `beta (rho - 1)` of the nonzero equilibria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointTransport {
    pub h: f64,
    /// Set when `rho <= 1`, where every solution has zero transport.
    pub below_onset: bool,
}

pub fn fixed_point_transport(rho: f64, beta: f64) -> FixedPointTransport {
    if rho <= 1.0 {
        FixedPointTransport { h: 0.0, below_onset: true }
    } else {
        FixedPointTransport { h: beta * (rho - 1.0), below_onset: false }
    }
}

/// Leading coefficients of `<Z>`, `<Z^2>`, `<Z^3>` on the symmetric orbit;
/// the averages are `coef * rho^n` up to relative `O(rho^(-1/2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragesZ {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub rho: Option<f64>,
}

impl AveragesZ {
    pub fn z1(&self) -> Option<f64> {
        self.rho.map(|r| self.c1 * r)
    }

    pub fn z2(&self) -> Option<f64> {
        self.rho.map(|r| self.c2 * r * r)
    }

    pub fn z3(&self) -> Option<f64> {
        self.rho.map(|r| self.c3 * r * r * r)
    }
}

/// `e1`, `e2` of the symmetric branch and `d1 = 4 e1 + beta e2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EExpressions {
    pub e1: f64,
    pub e2: f64,
    pub d1: f64,
}

pub fn e_expressions(md: &EllipticModulus, beta: f64) -> Result<EExpressions> {
    let (kk, ee) = if md.complement() == 0.0 { (f64::INFINITY, 1.0) } else { complete(md)? };
    let (m, m1) = (md.m(), md.complement());
    // at k = 1 the K terms carry a zero factor
    let e1 = if m1 == 0.0 {
        ee
    } else if m < 0.2 {
        crate::elliptic::ke_combination(&[1.0, -1.0], &[-1.0, 2.0], md)?
    } else {
        m1 * kk + (2.0 * m - 1.0) * ee
    };
    let e2 = (4.0 * m - 1.0) * kk + 4.0 * (1.0 - 2.0 * m) * ee;
    Ok(EExpressions { e1, e2, d1: 4.0 * e1 + beta * e2 })
}

/// The factor of the `beta^2` term in the `<Z^3>` coefficient.
pub fn z3_bracket(md: &EllipticModulus) -> Result<f64> {
    let (kk, ee) = complete(md)?;
    let m = md.m();
    Ok((32.0 * m * m - 36.0 * m + 19.0) * kk - (64.0 * m * m - 64.0 * m + 34.0) * ee)
}

pub fn averages_sym(bp: &BranchPoint, params: &Params) -> Result<AveragesZ> {
    require_branch(bp, Branch::Symmetric)?;
    let md = bp.modulus;
    let beta = params.beta();
    let (kk, ee) = complete(&md)?;
    let e = e_expressions(&md, beta)?;
    let g = kk - 2.0 * ee;
    let c1 = 1.0 - bp.b / params.sigma() * (1.0 - 2.0 * ee / kk);
    let c2 = 1.0 - 3.0 * beta * g * g / (e.d1 * e.d1 * kk) * (8.0 * e.e1 + beta * e.e2);
    let c3 = 1.0
        - 9.0 * beta * g * g / (5.0 * e.d1.powi(3) * kk)
            * (20.0 * e.d1 * e.e1 + beta * beta * g * z3_bracket(&md)?);
    Ok(AveragesZ { c1, c2, c3, rho: params.rho() })
}

/// The `lambda` where the `beta^2` part of the `<Z^3>` coefficient changes
/// sign; it is independent of `beta`.
pub fn z3_sign_threshold() -> Result<f64> {
    let kstar = find_kstar();
    let q = |k: f64| z3_bracket(&EllipticModulus::new(k)?);
    let (mut lo, mut hi) = (kstar + 1e-6, 0.99);
    let q_lo = q(lo)?;
    if q_lo.signum() == q(hi)?.signum() {
        return Err(Error::Bracket("z3 sign threshold"));
    }
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if q(mid)?.signum() == q_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    Ok(0.5 * (rhs_sym_modulus(&EllipticModulus::new(k)?)? + 1.0))
}

/// Rescaled transports `h = beta (1 - R)` and gaps `beta R` at one `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransportPoint {
    pub lambda: f64,
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub gap1: Option<f64>,
    pub gap2: Option<f64>,
}

fn require_branch(bp: &BranchPoint, branch: Branch) -> Result<()> {
    if bp.branch == branch {
        Ok(())
    } else {
        Err(Error::Domain(format!("expected a {} branch point", branch.name())))
    }
}

/// `R1 = (B/sigma)(1 - 2E/K)` or `R2 = (B/sigma)((2 - k^2)K - 2E)/(K k^2)`.
pub fn downshift(bp: &BranchPoint, params: &Params) -> Result<f64> {
    let md = bp.modulus;
    let (kk, ee) = complete(&md)?;
    let ratio = bp.b / params.sigma();
    Ok(match bp.branch {
        Branch::Symmetric => ratio * (1.0 - 2.0 * ee / kk),
        Branch::Asymmetric => ratio * ke_combination(&[2.0, -1.0], &[-2.0], &md)? / (kk * md.m()),
    })
}

pub fn h_transport(bp: &BranchPoint, params: &Params) -> Result<TransportPoint> {
    if (bp.lambda - params.lambda()).abs() > 1e-12 * bp.lambda.max(1.0) {
        return Err(Error::Domain("branch point solved for a different lambda".into()));
    }
    let beta = params.beta();
    let r = downshift(bp, params)?;
    let mut tp = TransportPoint { lambda: bp.lambda, ..Default::default() };
    match bp.branch {
        Branch::Symmetric => {
            tp.r1 = Some(r);
            tp.h1 = Some(beta * (1.0 - r));
            tp.gap1 = Some(beta * r);
        }
        Branch::Asymmetric => {
            tp.r2 = Some(r);
            tp.h2 = Some(beta * (1.0 - r));
            tp.gap2 = Some(beta * r);
        }
    }
    Ok(tp)
}

/// `bp` with `transport_h` set to its limiting `H / rho`.
pub fn fill_transport(bp: &BranchPoint, params: &Params) -> Result<BranchPoint> {
    let tp = h_transport(bp, params)?;
    Ok(BranchPoint { transport_h: tp.h1.or(tp.h2), ..*bp })
}

/// Both branches at `lambda` (the asymmetric one only on `(2/3, 1)`).
pub fn transport_point(lambda: f64, beta: f64) -> Result<TransportPoint> {
    let params = Params::from_lambda(lambda, beta)?;
    let mut tp = h_transport(&solve_sym_branch(&params)?, &params)?;
    if lambda < 1.0 {
        let asym = h_transport(&solve_asym_branch(&params)?, &params)?;
        tp.h2 = asym.h2;
        tp.r2 = asym.r2;
        tp.gap2 = asym.gap2;
    }
    Ok(tp)
}

/// `h1` along a grid of `lambda`, checking that it strictly increases.
pub fn monotone_h1_scan(lambda_grid: &[f64], beta: f64) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        let params = Params::from_lambda(lambda, beta)?;
        let h1 = h_transport(&solve_sym_branch(&params)?, &params)?.h1.unwrap_or(f64::NAN);
        if let Some(&(l0, h0)) = out.last() {
            if !(lambda > l0 && h1 > h0) {
                return Err(Error::Domain(format!("h1 not increasing between lambda {l0} and {lambda}")));
            }
        }
        out.push((lambda, h1));
    }
    Ok(out)
}

/// The `lambda` with `R1(lambda) = target` at fixed `beta`.
pub fn invert_r1(target: f64, beta: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Domain(format!("R1 target {target} outside (0, 1)")));
    }
    let r1 = |lambda: f64| -> Result<f64> {
        let params = Params::from_lambda(lambda, beta)?;
        downshift(&solve_sym_branch(&params)?, &params)
    };
    let mut lo = 2.0 / 3.0;
    let mut hi = 1.0;
    while r1(hi)? > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::Bracket("R1 inversion"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match r1(mid) {
            Ok(v) if v <= target => hi = mid,
            _ => lo = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mode-reduced Nusselt number `1 + 2H/(beta rho)`.
pub fn nusselt(h: f64, rho: f64, beta: f64) -> f64 {
    1.0 + 2.0 * h / (beta * rho)
}

/// Finite-time averages of the monomials entering the transport identities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TimeAverages {
    pub x2: f64,
    pub xy: f64,
    pub z: f64,
    pub xyz: f64,
    pub z2: f64,
    pub xyz2: f64,
    pub z3: f64,
    /// Length of the averaging window.
    pub span: f64,
}

/// Relative defects of `<X^2> = <XY> = beta<Z>`, `<XYZ> = beta<Z^2>` and
/// `<XYZ^2> = beta<Z^3>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionalityReport {
    pub x2_vs_xy: f64,
    pub xy_vs_z: f64,
    pub xyz_vs_z2: f64,
    pub xyz2_vs_z3: f64,
}

impl ProportionalityReport {
    pub fn worst(&self) -> f64 {
        [self.x2_vs_xy, self.xy_vs_z, self.xyz_vs_z2, self.xyz2_vs_z3]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn proportionality_check(avg: &TimeAverages, beta: f64) -> ProportionalityReport {
    let report = ProportionalityReport {
        x2_vs_xy: rel(avg.x2, avg.xy),
        xy_vs_z: rel(avg.xy, beta * avg.z),
        xyz_vs_z2: rel(avg.xyz, beta * avg.z2),
        xyz2_vs_z3: rel(avg.xyz2, beta * avg.z3),
    };
    if avg.span < 100.0 {
        log::warn!("averaging window {} is short; defects {:e}", avg.span, report.worst());
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_points() {
        assert_eq!(fixed_point_transport(1.0, 8.0 / 3.0).h, 0.0);
        assert!(fixed_point_transport(0.5, 8.0 / 3.0).below_onset);
        assert!((fixed_point_transport(28.0, 8.0 / 3.0).h - 72.0).abs() < 1e-12);
        assert!((fixed_point_transport(1000.0, 8.0 / 3.0).h - 2664.0).abs() < 1e-9);
    }

    #[test]
    fn nusselt_values() {
        assert_eq!(nusselt(0.0, 1000.0, 8.0 / 3.0), 1.0);
        assert!((nusselt(2664.0, 1000.0, 8.0 / 3.0) - 2.998).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_averages_are_proportional() {
        let (rho, beta) = (1000.0_f64, 8.0 / 3.0);
        let x = (beta * (rho - 1.0)).sqrt();
        let z = rho - 1.0;
        let avg = TimeAverages {
            x2: x * x,
            xy: x * x,
            z,
            xyz: x * x * z,
            z2: z * z,
            xyz2: x * x * z * z,
            z3: z * z * z,
            span: 1000.0,
        };
        assert!(proportionality_check(&avg, beta).worst() < 1e-15);
    }

    #[test]
    fn wrong_branch_rejected() {
        let p = Params::from_lambda(0.9, 8.0 / 3.0).unwrap();
        let bp = solve_asym_branch(&p).unwrap();
        assert!(averages_sym(&bp, &p).is_err());
    }
}
