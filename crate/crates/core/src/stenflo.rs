//! The Lorenz–Stenflo extension: its extra Melnikov function, simulated
//! transport and refined periodic orbits.

use crate::elliptic::complete;
use crate::error::Result;
use crate::melnikov::{solve_sym_branch, BranchPoint, Params};
use crate::odesim::{averaged_run, stenflo_rescaled, IntegratorOptions, Rescaling, State4};
use crate::orbits::Frame;
use crate::quadrature;
use crate::shooting::{refine_with_multipliers, seed_on_section, PeriodicOrbit, RescaledStenflo, Section, ShootingOptions};

/// The fourth Melnikov function along the symmetric orbit of `bp`,
/// `-T sigma chi0` with `T = 4K / sqrt(B)`.
pub fn melnikov_m4(bp: &BranchPoint, params: &Params, chi0: f64) -> Result<f64> {
    let (kk, _) = complete(&bp.modulus)?;
    Ok(-4.0 * kk / bp.b.sqrt() * params.sigma() * chi0)
}

/// The same function by quadrature of `-(xi + sigma chi0)` over one period.
pub fn melnikov_m4_quadrature(bp: &BranchPoint, params: &Params, chi0: f64) -> Result<f64> {
    let fam = bp.family()?;
    let period = fam.minimal_period()?;
    let sigma = params.sigma();
    quadrature::periodic(
        |tau| fam.eval(tau).map(|s| -(s.v[0] + sigma * chi0)).unwrap_or(f64::NAN),
        0.0,
        period,
        1e-12,
    )
}

/// Block structure of the four-dimensional Melnikov matrix: the Lorenz
/// `(tr, det)` block and the `chi` diagonal entry `dM4/dchi0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StenfloBlock {
    pub tr_lorenz: f64,
    pub det_lorenz: f64,
    pub dm4_dchi: f64,
    pub det_full: f64,
}

pub fn stenflo_block(bp: &BranchPoint, params: &Params) -> Result<StenfloBlock> {
    let dm4_dchi = melnikov_m4(bp, params, 1.0)?;
    Ok(StenfloBlock {
        tr_lorenz: bp.tr_dm,
        det_lorenz: bp.det_dm,
        dm4_dchi,
        det_full: bp.det_dm * dm4_dchi,
    })
}

/// Measured transport of a Lorenz–Stenflo run, original units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StenfloTransport {
    pub h: f64,
    pub beta_avg_z: f64,
    /// Time average of `V`.
    pub avg_v: f64,
    pub final_state: State4,
}

/// `<XY>` over `[t_transient, t_end]` (original time) for rotation `s`. The
/// run is integrated in the rescaled frame. With `s = 0` the `V` equation is
/// left out of step control, so `(X, Y, Z)` follow the Lorenz run bit for bit.
pub fn measure_stenflo_transport(
    params: &Params,
    s_rot: f64,
    x0: &State4,
    t_end: f64,
    t_transient: f64,
    opts: &IntegratorOptions,
) -> Result<StenfloTransport> {
    let scale = Rescaling::from_params(params)?;
    let eps = scale.eps;
    let y0 = match x0.frame {
        Frame::Rescaled => x0.v,
        Frame::Original => {
            let head = scale.to_rescaled(&x0.head())?.v;
            [head[0], head[1], head[2], eps * x0.v[3]]
        }
    };
    let (sigma, beta) = (params.sigma(), params.beta());
    let mut opts = *opts;
    if s_rot == 0.0 {
        opts.error_components = Some(3);
    }
    let f = |_: f64, y: &[f64; 4]| stenflo_rescaled(y, eps, sigma, beta, s_rot);
    let run = averaged_run(f, y0, &scale, t_end, t_transient, &opts, |y| y[3] / eps)?;
    let last = run.last;
    let head = scale.to_original(&crate::orbits::State3::rescaled(last[0], last[1], last[2]))?;
    Ok(StenfloTransport {
        h: run.averages.xy,
        beta_avg_z: beta * run.averages.z,
        avg_v: run.extra,
        final_state: State4::original(head.v[0], head.v[1], head.v[2], last[3] / eps),
    })
}

/// A refined Lorenz–Stenflo orbit with `chi` statistics over one period.
#[derive(Debug, Clone, PartialEq)]
pub struct StenfloOrbit {
    pub orbit: PeriodicOrbit<4>,
    pub chi_mean: f64,
    pub chi_rms: f64,
    /// `<XY> / rho` on the orbit.
    pub h_over_rho: f64,
}

/// Refines the symmetric orbit seeded by the Lorenz branch with `chi = 0`.
pub fn refine_stenflo_orbit(params: &Params, s_rot: f64, opts: &ShootingOptions) -> Result<StenfloOrbit> {
    let bp = solve_sym_branch(params)?;
    let field = RescaledStenflo::from_params(params, s_rot)?;
    let (seed, period) = seed_on_section(&bp.family()?, &Section::eta_zero())?;
    let guess = [seed[0], seed[1], seed[2], 0.0];
    let orbit = refine_with_multipliers(&field, &guess, period, &Section::<4>::eta_zero(), opts)?;
    let eps = field.eps;
    let sigma = params.sigma();
    let [chi_mean, chi2, xi_eta] = orbit.averages(&field, |y| [y[3], y[3] * y[3], y[0] * y[1]], &opts.integrator)?;
    Ok(StenfloOrbit {
        orbit,
        chi_mean,
        chi_rms: (chi2 - chi_mean * chi_mean).max(0.0).sqrt(),
        h_over_rho: xi_eta / (eps * sigma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m4_vanishes_only_at_zero_chi() {
        let p = Params::new(10.0, 8.0 / 3.0).unwrap();
        let bp = solve_sym_branch(&p).unwrap();
        assert_eq!(melnikov_m4(&bp, &p, 0.0).unwrap(), 0.0);
        assert!(melnikov_m4(&bp, &p, 1e-3).unwrap() < 0.0);
        let q = melnikov_m4_quadrature(&bp, &p, 0.7).unwrap();
        let c = melnikov_m4(&bp, &p, 0.7).unwrap();
        assert!((q - c).abs() < 1e-9 * c.abs());
    }
}
