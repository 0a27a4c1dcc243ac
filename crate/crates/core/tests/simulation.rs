mod common;

use largerho::odesim::{
    integrate_to, lorenz, measure_transport, simulate_lorenz, x_plus, IntegratorOptions, Rescaling, Sampling,
};
use largerho::transport::{fixed_point_transport, proportionality_check, transport_point};
use largerho::{Params, State3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BETA: f64 = 8.0 / 3.0;

fn bound_holds(h: f64, rho: f64, beta: f64) -> bool {
    h <= fixed_point_transport(rho, beta).h.max(0.0) * (1.0 + 5e-3) + 1e-9
}

#[test]
fn adaptive_solver_matches_fixed_step_oracle() {
    let (sigma, beta, rho) = (10.0, BETA, 28.0);
    let y0 = [1.0, 1.0, 1.0];
    let opts = IntegratorOptions::tolerances(1e-12, 1e-12);
    let (y, _) = integrate_to(|_, y: &[f64; 3]| lorenz(y, sigma, beta, rho), 0.0, y0, 2.0, &opts).unwrap();
    let oracle = common::rk4(|y| lorenz(y, sigma, beta, rho), y0, 2.0, 200_000);
    for i in 0..3 {
        assert!((y[i] - oracle[i]).abs() < 1e-7 * (1.0 + oracle[i].abs()), "{y:?} vs {oracle:?}");
    }
}

#[test]
fn below_onset_transport_vanishes() {
    let p = Params::new(10.0, BETA).unwrap().with_rho(0.5).unwrap();
    let traj = simulate_lorenz(&p, &State3::original(3.0, -2.0, 5.0), 60.0, &IntegratorOptions::default(), Sampling::Final).unwrap();
    let (_, y) = traj.last().unwrap();
    assert!(y.iter().all(|v| v.abs() < 1e-6));
    assert_eq!(fixed_point_transport(0.5, BETA).h, 0.0);
}

#[test]
fn equilibrium_run_attains_the_bound() {
    // rho below the Hopf value: the run settles on X+
    let rho = 20.0;
    let p = Params::new(10.0, BETA).unwrap().with_rho(rho).unwrap();
    let x0 = x_plus(rho, BETA);
    let start = State3::original(x0.v[0] + 0.5, x0.v[1], x0.v[2]);
    let m = measure_transport(&p, &start, 200.0, 100.0, &IntegratorOptions::tolerances(1e-10, 1e-12)).unwrap();
    let hmax = BETA * (rho - 1.0);
    assert!((m.h - hmax).abs() < 1e-6 * hmax);
    assert!(bound_holds(m.h, rho, BETA));
}

#[test]
fn random_initial_conditions_respect_bound_and_proportionality() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rho = 1000.0;
    let p = Params::new(10.0, BETA).unwrap().with_rho(rho).unwrap();
    let opts = IntegratorOptions::tolerances(1e-9, 1e-11);
    for _ in 0..3 {
        let x0 = State3::original(rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0), rng.random_range(0.0..60.0));
        let m = measure_transport(&p, &x0, 520.0, 20.0, &opts).unwrap();
        assert!(bound_holds(m.h, rho, BETA), "H = {} exceeds bound", m.h);
        let rep = proportionality_check(&m.averages, BETA);
        assert!(rep.xy_vs_z < 1e-3, "<XY> vs beta<Z>: {:e}", rep.xy_vs_z);
        let h1 = transport_point(p.lambda(), BETA).unwrap().h1.unwrap();
        assert!((m.h / rho - h1).abs() < 0.1 * h1, "H/rho = {} vs h1 = {h1}", m.h / rho);
    }
}

#[test]
fn rescaling_round_trip() {
    let s = Rescaling::new(1e4, 10.0);
    let x = State3::original(12.0, -7.0, 950.0);
    let back = s.to_original(&s.to_rescaled(&x).unwrap()).unwrap();
    for i in 0..3 {
        assert!((back.v[i] - x.v[i]).abs() < 1e-12 * x.v[i].abs().max(1.0));
    }
    assert!((s.time(s.tau(3.0)) - 3.0).abs() < 1e-15);
}
