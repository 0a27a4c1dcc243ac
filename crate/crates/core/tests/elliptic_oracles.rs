mod common;

use std::f64::consts::FRAC_PI_2;

use largerho::elliptic::{complete, find_kstar, jacobi, ke_combination};
use largerho::EllipticModulus;
use proptest::prelude::*;

fn ke(k: f64) -> (f64, f64) {
    complete(&EllipticModulus::new(k).unwrap()).unwrap()
}

#[test]
fn agm_matches_quadrature() {
    for i in 0..50 {
        let k = 0.99 * i as f64 / 49.0;
        let (kk, ee) = ke(k);
        assert!((kk - common::k_quad(k)).abs() <= 1e-10 * kk, "K at {k}");
        assert!((ee - common::e_quad(k)).abs() <= 1e-10 * ee, "E at {k}");
    }
}

#[test]
fn legendre_relation() {
    for i in 1..=50 {
        let k = i as f64 / 51.0;
        let md = EllipticModulus::new(k).unwrap();
        let (kk, ee) = complete(&md).unwrap();
        let (kc, ec) = complete(&md.conjugate()).unwrap();
        let r = ee * kc + ec * kk - kk * kc - FRAC_PI_2;
        assert!(r.abs() < 1e-11, "k = {k}: {r:e}");
    }
}

#[test]
fn near_one_asymptote() {
    // K ~ ln(4/k') for k' -> 0
    let md = EllipticModulus::from_complement(1e-20).unwrap();
    let (kk, ee) = complete(&md).unwrap();
    assert!((kk - (4.0_f64.ln() - 0.5 * (1e-20_f64).ln())).abs() < 1e-12);
    assert!((ee - 1.0).abs() < 1e-15);
}

#[test]
fn kstar_defining_residual() {
    let k = find_kstar();
    assert!((k - 0.908909).abs() < 1e-5);
    let (kk, ee) = ke(k);
    assert!((kk - 2.0 * ee).abs() < 1e-11);
}

#[test]
fn series_combination_cancels() {
    // (2 - m)K - 2E = (pi/2)(3/32 m^2 + ...) against the Maclaurin oracle
    let a = common::k_series_coefficients(60);
    for &k in &[1e-4, 1e-2, 0.1, 0.3] {
        let md = EllipticModulus::new(k).unwrap();
        let got = ke_combination(&[2.0, -1.0], &[-2.0], &md).unwrap();
        let m = k * k;
        let mut want = 0.0;
        let mut mp = 1.0;
        for n in 0..59 {
            let e_n = a[n] / (1.0 - 2.0 * n as f64);
            let c = 2.0 * a[n] - if n > 0 { a[n - 1] } else { 0.0 } - 2.0 * e_n;
            want += c * mp;
            mp *= m;
        }
        want *= FRAC_PI_2;
        assert!((got - want).abs() <= 1e-12 * want.abs(), "k = {k}: {got:e} vs {want:e}");
    }
}

#[test]
fn jacobi_against_amplitude_inversion() {
    for &k in &[0.1, 0.5, 0.9, 0.99] {
        let md = EllipticModulus::new(k).unwrap();
        for &u in &[0.05, 0.4, 1.1, 2.3] {
            let phi = common::amplitude(u, k * k);
            let j = jacobi(u, &md).unwrap();
            assert!((j.sn - phi.sin()).abs() < 1e-10, "sn k={k} u={u}");
            assert!((j.cn - phi.cos()).abs() < 1e-10, "cn k={k} u={u}");
            assert!((j.dn - (1.0 - k * k * phi.sin().powi(2)).sqrt()).abs() < 1e-10);
        }
    }
}

#[test]
fn jacobi_at_half_and_full_period() {
    let md = EllipticModulus::new(0.7).unwrap();
    let (kk, _) = complete(&md).unwrap();
    let h = jacobi(2.0 * kk, &md).unwrap();
    assert!(h.sn.abs() < 1e-13 && (h.cn + 1.0).abs() < 1e-13 && (h.dn - 1.0).abs() < 1e-13);
}

proptest! {
    #[test]
    fn jacobi_identities(k in 0.0..0.999_f64, u in -50.0..50.0_f64) {
        let md = EllipticModulus::new(k).unwrap();
        let j = jacobi(u, &md).unwrap();
        prop_assert!((j.sn * j.sn + j.cn * j.cn - 1.0).abs() < 1e-12);
        prop_assert!((j.dn * j.dn + k * k * j.sn * j.sn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_periodicity(k in 0.0..0.99_f64, u in -5.0..5.0_f64) {
        let md = EllipticModulus::new(k).unwrap();
        let (kk, _) = complete(&md).unwrap();
        let a = jacobi(u, &md).unwrap();
        let b = jacobi(u + 4.0 * kk, &md).unwrap();
        let c = jacobi(u + 2.0 * kk, &md).unwrap();
        prop_assert!((a.sn - b.sn).abs() < 1e-11 && (a.cn - b.cn).abs() < 1e-11);
        prop_assert!((a.sn + c.sn).abs() < 1e-11 && (a.dn - c.dn).abs() < 1e-11);
    }

    #[test]
    fn k_increases_e_decreases(a in 0.0..0.999_f64, b in 0.0..0.999_f64) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (k0, e0) = ke(lo);
        let (k1, e1) = ke(hi);
        prop_assert!(k1 > k0 && e1 < e0);
    }
}
