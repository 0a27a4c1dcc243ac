mod common;

use largerho::appendix::{
    f2_identity, interval_of_positivity, ku_constant, positivity_claims, r_plus, sandwich_violation, series_coefficients,
    tau_by_convolution,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Coefficients of `(1 - x)^a` in powers of `x`.
fn binomial_series(a: f64, x_scale: f64, n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for i in 1..n {
        let prev = out[i - 1];
        out.push(prev * (i as f64 - 1.0 - a) / i as f64 * x_scale);
    }
    out
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len()).map(|n| (0..=n).map(|j| a[j] * b[n - j]).sum()).collect()
}

#[test]
fn float_oracle_for_small_tau() {
    let n = 31;
    // r+ = (1 - m)^(1/4) (1 - m/2)^(1/2)
    let c = convolve(&binomial_series(0.25, 1.0, n), &binomial_series(0.5, 0.5, n));
    let a = common::k_series_coefficients(n);
    let s = series_coefficients(40).unwrap();
    for i in 0..n {
        let e_i = a[i] / (1.0 - 2.0 * i as f64);
        let terms: Vec<f64> = (0..=i).map(|j| c[j] * a[i - j]).collect();
        let tau = e_i - terms.iter().sum::<f64>();
        let scale = e_i.abs() + terms.iter().map(|t| t.abs()).sum::<f64>();
        let exact = s.tau[i].to_f64().unwrap();
        assert!((tau - exact).abs() < 1e-13 * scale, "tau_{i}: {tau:e} vs {exact:e}");
        assert!((c[i] - s.c[i].to_f64().unwrap()).abs() < 1e-15 * c[i].abs().max(1e-300), "c_{i}");
    }
}

#[test]
fn r_plus_series_matches_closed_form() {
    let s = series_coefficients(60).unwrap();
    let k: f64 = 0.3;
    let m = k * k;
    let sum: f64 = s.c.iter().enumerate().map(|(i, c)| c.to_f64().unwrap() * m.powi(i as i32)).sum();
    assert!((sum - r_plus(k)).abs() < 1e-15);
}

#[test]
fn tabulated_tau_values() {
    let s = series_coefficients(9).unwrap();
    let want = [(4, frac(3, 2048)), (5, frac(21, 8192)), (6, frac(421, 131072)), (7, frac(1859, 524288)), (8, frac(247197, 67108864))];
    for (i, v) in want {
        assert_eq!(s.tau[i], v, "tau_{i}");
    }
    assert_eq!(tau_by_convolution(&s, 9), s.tau);
}

#[test]
fn n9_bound_covers_half() {
    let s = series_coefficients(9).unwrap();
    let iv = interval_of_positivity(&s, 0.5).unwrap();
    assert!((iv.bound - 0.517).abs() < 5e-4, "{}", iv.bound);
    assert!(iv.covers());
}

#[test]
fn sandwich_and_positivity_to_2360() {
    let s = series_coefficients(2360).unwrap();
    assert_eq!(sandwich_violation(&s), None);
    let iv = interval_of_positivity(&s, 0.9984).unwrap();
    assert_eq!(iv.first_nonpositive, None);
    assert!(iv.covers(), "bound {}", iv.bound);
}

#[test]
fn ku_root_against_quadrature() {
    let k = ku_constant();
    let kk = common::k_quad(k);
    assert!(((1.0 - k * k) * kk.powi(3) - 0.25).abs() < 1e-8);
}

#[test]
fn f2_identity_and_claims() {
    for i in 1..100 {
        let k = i as f64 / 100.0;
        let id = f2_identity(k).unwrap();
        assert!(id.relative_error() < 1e-9, "k = {k}: {:e}", id.relative_error());
    }
    for r in positivity_claims(2000) {
        assert!(r.pass, "{} fails at {} ({:e})", r.claim, r.worst_at, r.worst_margin);
    }
}
