use largerho::melnikov::{floquet_prediction, solve_asym_branch, solve_sym_branch};
use largerho::shooting::{dm_per_revolution, refine_from_branch, JacobianMethod, ShootingOptions, Symmetry};
use largerho::Params;
use num_complex::Complex64;

const BETA: f64 = 8.0 / 3.0;

fn shoot_sym(lambda: f64, rho: f64) -> (Vec<Complex64>, (Complex64, Complex64)) {
    let p = Params::from_lambda(lambda, BETA).unwrap().with_rho(rho).unwrap();
    let bp = solve_sym_branch(&p).unwrap();
    let orbit = refine_from_branch(&bp, &p, &ShootingOptions::default()).unwrap();
    let (tr, det) = dm_per_revolution(&bp);
    (orbit.multipliers, floquet_prediction(tr, det, p.epsilon().unwrap()))
}

fn pair_error(got: &[Complex64], want: (Complex64, Complex64)) -> f64 {
    let a = (got[0] - want.0).norm().max((got[1] - want.1).norm());
    let b = (got[0] - want.1).norm().max((got[1] - want.0).norm());
    a.min(b)
}

#[test]
fn symmetric_orbit_is_stable_and_prediction_error_is_second_order() {
    let lambda = 33.0 / 14.0;
    let (m4, p4) = shoot_sym(lambda, 1e4);
    let (m6, p6) = shoot_sym(lambda, 1e6);
    for m in [&m4, &m6] {
        assert_eq!(m.len(), 2);
        assert!(m.iter().all(|z| z.norm() < 1.0));
        assert!((m[0] - m[1].conj()).norm() < 1e-8);
    }
    let (e4, e6) = (pair_error(&m4, p4), pair_error(&m6, p6));
    // eps drops by 10: an O(eps^2) remainder drops by ~100
    assert!(e4 / e6 > 30.0, "error ratio {}", e4 / e6);
    assert!(e6 < 1e-2);
}

#[test]
fn asymmetric_orbit_is_a_saddle() {
    let p = Params::from_lambda(0.9, BETA).unwrap().with_rho(1e6).unwrap();
    let bp = solve_asym_branch(&p).unwrap();
    let orbit = refine_from_branch(&bp, &p, &ShootingOptions::default()).unwrap();
    let outside = orbit.multipliers.iter().filter(|z| z.norm() > 1.0).count();
    assert_eq!(outside, 1, "{:?}", orbit.multipliers);
    assert!(matches!(orbit.symmetry, Symmetry::AsymmetricPlus | Symmetry::AsymmetricMinus), "{:?}", orbit.symmetry);
    let (tr, det) = dm_per_revolution(&bp);
    let pred = floquet_prediction(tr, det, p.epsilon().unwrap());
    assert!(pair_error(&orbit.multipliers, pred) < 1e-3);
}

#[test]
fn trivial_multiplier_is_one_and_jacobians_agree() {
    let p = Params::from_lambda(1.5, BETA).unwrap().with_rho(1e6).unwrap();
    let bp = solve_sym_branch(&p).unwrap();
    let var = refine_from_branch(&bp, &p, &ShootingOptions::default()).unwrap();
    assert!((var.trivial_multiplier.unwrap() - 1.0).norm() < 1e-6);
    assert_eq!(var.symmetry, Symmetry::Symmetric);
    let fd_opts = ShootingOptions { jacobian: JacobianMethod::ForwardDifference, tol: 1e-8, ..ShootingOptions::default() };
    let fd = refine_from_branch(&bp, &p, &fd_opts).unwrap();
    assert!((fd.period - var.period).abs() < 1e-6 * var.period);
    assert!(pair_error(&fd.multipliers, (var.multipliers[0], var.multipliers[1])) < 1e-5);
}

#[test]
fn low_rho_chaotic_case_fails_to_converge() {
    let p = Params::from_lambda(2.36, BETA).unwrap().with_rho(50.0).unwrap();
    let bp = solve_sym_branch(&p).unwrap();
    assert!(refine_from_branch(&bp, &p, &ShootingOptions::default()).is_err());
}
