//! Numeric checks of the positivity claims behind the branch analysis, and
//! the exact series apparatus for `E - r+ K`.
//!
//! The grid scans here are verification, not proof.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::elliptic::{complete, ellip_k, find_kstar, EllipticModulus};
use crate::error::{Error, Result};
pub use crate::transport::{e_expressions, EExpressions};

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `(73/20 - 2k^2)(K/E)^2 - 6K/E + 5`.
pub fn f1_third_factor(k: f64) -> Result<f64> {
    let md = EllipticModulus::new(k)?;
    let (kk, ee) = complete(&md)?;
    let r = kk / ee;
    Ok((73.0 / 20.0 - 2.0 * md.m()) * r * r - 6.0 * r + 5.0)
}

/// Maclaurin coefficients in `m` of `F2 / (pi/2)^4`.
fn f2_series() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let d = 80;
        let p2 = p2_sequence(d);
        let kt: Vec<BigRational> = p2.iter().map(|p| p * p).collect();
        let et: Vec<BigRational> = kt.iter().enumerate().map(|(n, q)| q / ratio(1 - 2 * n as i64, 1)).collect();
        let mul = |a: &[BigRational], b: &[BigRational]| -> Vec<BigRational> {
            (0..d)
                .map(|n| (0..=n).fold(BigRational::zero(), |acc, j| acc + &a[j] * &b[n - j]))
                .collect()
        };
        let poly = |c: &[i64], a: &[BigRational]| -> Vec<BigRational> {
            (0..d)
                .map(|n| {
                    c.iter()
                        .enumerate()
                        .filter(|(j, _)| *j <= n)
                        .fold(BigRational::zero(), |acc, (j, cj)| acc + &a[n - j] * ratio(*cj, 1))
                })
                .collect()
        };
        let e2 = mul(&et, &et);
        let k2 = mul(&kt, &kt);
        let e4 = mul(&e2, &e2);
        let e3k = mul(&e2, &mul(&et, &kt));
        let e2k2 = mul(&e2, &k2);
        let ek3 = mul(&mul(&et, &kt), &k2);
        let k4 = mul(&k2, &k2);
        // (2-m), (1-m), (1-m)(2-m), (2-m)^2(1-m), (2-m)(1-m)^2
        let terms = [
            poly(&[2, -1], &e4),
            poly(&[-8, 8], &e3k),
            poly(&[12, -18, 6], &e2k2),
            poly(&[-8, 16, -10, 2], &ek3),
            poly(&[2, -5, 4, -1], &k4),
        ];
        (0..d)
            .map(|n| terms.iter().fold(BigRational::zero(), |acc, t| acc + &t[n]).to_f64().unwrap_or(f64::NAN))
            .collect()
    })
}

const F2_SERIES_MAX_M: f64 = 0.3;

/// `F2(k)`. Below `m = 0.3` the value comes from exact series coefficients
/// since the five terms cancel to `O(m^6)`.
pub fn f2(k: f64) -> Result<f64> {
    let md = EllipticModulus::new(k)?;
    let m = md.m();
    if m <= F2_SERIES_MAX_M {
        let c = f2_series();
        let s = c.iter().rev().fold(0.0, |acc, ci| acc * m + ci);
        return Ok(FRAC_PI_2.powi(4) * s);
    }
    let (kk, ee) = complete(&md)?;
    Ok(f2_terms(m, kk, ee).iter().sum())
}

fn f2_terms(m: f64, kk: f64, ee: f64) -> [f64; 5] {
    let (a, b) = (2.0 - m, 1.0 - m);
    [
        a * ee.powi(4),
        -8.0 * b * ee.powi(3) * kk,
        6.0 * b * a * ee * ee * kk * kk,
        -2.0 * a * a * b * ee * kk.powi(3),
        a * b * b * kk.powi(4),
    ]
}

/// Both sides of `F2 - (p1 E - p2 K)^4 = k^4/(2 - k^2) (E^4 - (1-k^2)(1-k^2/2)^2 K^4)`
/// and the magnitude scale of the terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F2Identity {
    pub lhs: f64,
    pub rhs: f64,
    pub scale: f64,
}

impl F2Identity {
    pub fn relative_error(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.scale
    }
}

pub fn f2_identity(k: f64) -> Result<F2Identity> {
    let md = EllipticModulus::new(k)?;
    let m = md.m();
    let (kk, ee) = complete(&md)?;
    let terms = f2_terms(m, kk, ee);
    let p1 = (4.0 * (1.0 - m) / (2.0 - m)).powf(0.25);
    let p2 = ((1.0 - m) * (2.0 - m).powi(3) / 4.0).powf(0.25);
    let lhs = terms.iter().sum::<f64>() - (p1 * ee - p2 * kk).powi(4);
    let r4 = (1.0 - m) * (1.0 - 0.5 * m).powi(2);
    let rhs = m * m / (2.0 - m) * (ee.powi(4) - r4 * kk.powi(4));
    let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max((p1 * ee).powi(4));
    Ok(F2Identity { lhs, rhs, scale })
}

/// `3(2 - k^2)K - 4E`.
pub fn f2_middle_factor(k: f64) -> Result<f64> {
    let md = EllipticModulus::new(k)?;
    let (kk, ee) = complete(&md)?;
    Ok(3.0 * (2.0 - md.m()) * kk - 4.0 * ee)
}

/// `r+ = ((1 - k^2)(1 - k^2/2)^2)^(1/4)`.
pub fn r_plus(k: f64) -> f64 {
    let m = k * k;
    ((1.0 - m) * (1.0 - 0.5 * m).powi(2)).powf(0.25)
}

/// Exact coefficients of the series for `r+`, `K` and `E - r+ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    /// `r+ = sum c_n k^(2n)`.
    pub c: Vec<BigRational>,
    /// `P_2n = (2n)! / (2^(2n) (n!)^2)`.
    pub p2: Vec<BigRational>,
    /// `E - r_N K = (pi/2) sum tau_n k^(2n)`.
    pub tau: Vec<BigRational>,
    pub n: usize,
}

fn p2_sequence(len: usize) -> Vec<BigRational> {
    let mut p = Vec::with_capacity(len);
    let mut cur = BigRational::one();
    for n in 0..len {
        if n > 0 {
            cur = cur * ratio(2 * n as i64 - 1, 2 * n as i64);
        }
        p.push(cur.clone());
    }
    p
}

type Poly = Vec<i64>;

fn pmul(a: &[i64], b: &[i64]) -> Poly {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn padd(a: &[i64], b: &[i64]) -> Poly {
    (0..a.len().max(b.len())).map(|i| a.get(i).unwrap_or(&0) + b.get(i).unwrap_or(&0)).collect()
}

fn pscale(a: &[i64], s: i64) -> Poly {
    a.iter().map(|x| x * s).collect()
}

/// Polynomial coefficients `[P0, P1, P2]` of the second-order equation
/// `P2 y'' + P1 y' + P0 y = 0` satisfied by `y = r+ (2K/pi)` in `x = k^2`.
fn product_ode() -> [Poly; 3] {
    // r'/r = u/d, and 2K/pi solves x(1-x)K'' + (1-2x)K' - K/4 = 0
    let u = vec![-4, 3];
    let d = vec![8, -12, 4];
    let dd = vec![-12, 8];
    let x1x = vec![0, 1, -1];
    let one2x = vec![1, -2];
    let d2 = pmul(&d, &d);
    let p2 = pmul(&x1x, &d2);
    let p1 = padd(&pscale(&pmul(&pmul(&x1x, &u), &d), -2), &pmul(&one2x, &d2));
    let inner = padd(&padd(&pmul(&u, &u), &pscale(&d, -3)), &pmul(&u, &dd));
    let p0 = padd(
        &padd(&pmul(&x1x, &inner), &pscale(&pmul(&pmul(&one2x, &u), &d), -1)),
        &d2.iter().map(|c| -c / 4).collect::<Vec<_>>(),
    );
    [p0, p1, p2]
}

fn falling(n: i64, k: usize) -> i64 {
    (0..k as i64).map(|i| n - i).product()
}

/// `num / (odd 2^shift)` in lowest terms, for odd positive `odd`.
fn reduced(num: BigInt, odd: i64, shift: u64) -> BigRational {
    if num.is_zero() {
        return BigRational::zero();
    }
    let tz = num.trailing_zeros().unwrap_or(0).min(shift);
    let mut num = num >> tz;
    let mut den = BigInt::one() << (shift - tz);
    let r = (&num % odd).to_i64().unwrap_or(0).abs();
    let g = num_integer::gcd(r, odd);
    num /= g;
    den *= odd / g;
    BigRational::new_raw(num, den)
}

/// Scaled integers `c_n 2^shift`; every `c_n` is dyadic and each division
/// is checked to be exact.
fn c_scaled(len: usize, shift: u64) -> Result<Vec<BigInt>> {
    let mut c = vec![BigInt::one() << shift, -(BigInt::one() << (shift - 1))];
    for n in 0..len.saturating_sub(2) as i64 {
        let num = &c[n as usize + 1] * (8 + 12 * n) - &c[n as usize] * (4 * n - 3);
        let den = BigInt::from(16 + 8 * n);
        if !(&num % &den).is_zero() {
            return Err(Error::Domain(format!("c_{} is not dyadic within 2^-{shift}", n + 2)));
        }
        c.push(num / den);
    }
    c.truncate(len);
    Ok(c)
}

/// Scaled integers `g_n 2^shift` for `g = r+ (2K/pi)`, by the recurrence of
/// [`product_ode`]. Every `g_n` is dyadic, so each division is checked to be
/// exact.
fn g_scaled(len: usize, shift: u64) -> Result<Vec<BigInt>> {
    let ode = product_ode();
    let mut g: Vec<BigInt> = vec![BigInt::one() << shift];
    for m in 0..len.saturating_sub(1) as i64 {
        // coefficient of x^m: sum_k sum_j p_kj ff(m - j + k, k) g_(m - j + k)
        let mut lead = 0_i64;
        let mut rest = BigInt::zero();
        for (k, poly) in ode.iter().enumerate() {
            for (j, &p) in poly.iter().enumerate() {
                let idx = m - j as i64 + k as i64;
                if p == 0 || idx < 0 {
                    continue;
                }
                let w = p * falling(idx, k);
                if idx == m + 1 {
                    lead += w;
                } else if w != 0 {
                    rest += &g[idx as usize] * w;
                }
            }
        }
        if lead == 0 {
            return Err(Error::Domain(format!("series recurrence degenerates at {m}")));
        }
        let lead = BigInt::from(lead);
        if !(&rest % &lead).is_zero() {
            return Err(Error::Domain(format!("g_{} is not dyadic within 2^-{shift}", m + 1)));
        }
        g.push(-rest / lead);
    }
    Ok(g)
}

/// Exact `c_n`, `P_2n` and `tau_n` for `0 <= n <= N`.
pub fn series_coefficients(n: usize) -> Result<SeriesCoefficients> {
    if n < 5 {
        return Err(Error::Domain(format!("series truncation N = {n} must be at least 5")));
    }
    let len = n + 1;
    let shift = 4 * len as u64 + 64;
    // central binomials b_n, with P_2n = b_n / 4^n
    let mut binom = vec![BigInt::one()];
    for i in 1..len as u64 {
        let next = &binom[i as usize - 1] * (2 * (2 * i - 1)) / i;
        binom.push(next);
    }
    let p2 = binom.iter().enumerate().map(|(i, b)| reduced(b.clone(), 1, 2 * i as u64)).collect();
    let c = c_scaled(len, shift)?.into_iter().map(|v| reduced(v, 1, shift)).collect();
    let g = g_scaled(len, shift)?;
    // tau_n = P_2n^2 / (1 - 2n) - g_n; for n <= N the truncation of r+ is inactive
    let tau = g
        .into_iter()
        .enumerate()
        .map(|(i, gi)| {
            let q = (&binom[i] * &binom[i]) << (shift - 4 * i as u64);
            let odd = 2 * i as i64 - 1;
            if i == 0 {
                reduced(q - gi, 1, shift)
            } else {
                reduced(-(q + gi * odd), odd, shift)
            }
        })
        .collect();
    Ok(SeriesCoefficients { c, p2, tau, n })
}

/// `tau_n` by direct convolution; quadratic cost, used for cross-checks.
pub fn tau_by_convolution(series: &SeriesCoefficients, upto: usize) -> Vec<BigRational> {
    let q: Vec<BigRational> = series.p2.iter().map(|p| p * p).collect();
    (0..=upto.min(series.n))
        .map(|n| {
            let lead = &q[n] * ratio(2 * n as i64, 1 - 2 * n as i64);
            (1..=n).fold(lead, |acc, m| acc - &series.c[m] * &q[n - m])
        })
        .collect()
}

/// First `n >= 2` violating `2 c_(n+1) <= c_n <= c_(n+1) < 0`, if any.
pub fn sandwich_violation(series: &SeriesCoefficients) -> Option<usize> {
    let two = ratio(2, 1);
    (2..series.c.len() - 1).find(|&n| {
        let (a, b) = (&series.c[n], &series.c[n + 1]);
        !(&two * b <= *a && a <= b && b.is_negative())
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityInterval {
    /// `(3 pi / (4096 K(k_ell)))^(1/(2N - 8))`.
    pub bound: f64,
    pub k_ell: f64,
    pub n: usize,
    /// First `n` in `5..N` with `tau_n <= 0`.
    pub first_nonpositive: Option<usize>,
}

impl PositivityInterval {
    /// The bound covers `(0, k_ell)` and every middle `tau_n` is positive.
    pub fn covers(&self) -> bool {
        self.bound >= self.k_ell && self.first_nonpositive.is_none()
    }
}

pub fn positivity_bound(n: usize, k_ell: f64) -> Result<f64> {
    if n < 5 || !(k_ell > 0.0 && k_ell < 1.0) {
        return Err(Error::Domain(format!("need N >= 5 and 0 < k_ell < 1, got {n}, {k_ell}")));
    }
    let kl = ellip_k(&EllipticModulus::new(k_ell)?)?;
    Ok((3.0 * std::f64::consts::PI / (4096.0 * kl)).powf(1.0 / (2 * n - 8) as f64))
}

pub fn interval_of_positivity(series: &SeriesCoefficients, k_ell: f64) -> Result<PositivityInterval> {
    let n = series.n;
    let bound = positivity_bound(n, k_ell)?;
    let first_nonpositive = (5..n).find(|&i| !series.tau[i].is_positive());
    Ok(PositivityInterval { bound, k_ell, n, first_nonpositive })
}

/// The root of `(1 - k^2) K(k)^3 = 1/4`.
pub fn ku_constant() -> f64 {
    let f = |k: f64| {
        let md = EllipticModulus::new(k).expect("k in (0,1)");
        md.complement() * ellip_k(&md).expect("k < 1").powi(3) - 0.25
    };
    let (mut lo, mut hi) = (0.99_f64, 0.99999_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Grid of `uniform` points inside `(a, b)` plus `per_end` points
/// concentrated logarithmically toward each endpoint.
pub fn verification_grid(a: f64, b: f64, uniform: usize, per_end: usize) -> Vec<f64> {
    let w = b - a;
    let mut g: Vec<f64> = (1..=uniform).map(|i| a + w * i as f64 / (uniform + 1) as f64).collect();
    for i in 0..per_end {
        let t = 10f64.powf(-1.0 - 14.0 * i as f64 / per_end.max(1) as f64);
        g.push(a + w * t);
        g.push(b - w * t);
    }
    g.retain(|x| *x > a && *x < b);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Outcome of one positivity scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimReport {
    pub claim: &'static str,
    pub points: usize,
    pub worst_margin: f64,
    pub worst_at: f64,
    pub pass: bool,
}

/// Scans `f > 0` over `grid`; evaluation errors count as failures.
pub fn scan_positive<F: Fn(f64) -> Result<f64>>(claim: &'static str, grid: &[f64], f: F) -> ClaimReport {
    let mut worst = (f64::INFINITY, f64::NAN);
    let mut pass = true;
    for &k in grid {
        match f(k) {
            Ok(v) if v > 0.0 => {
                if v < worst.0 {
                    worst = (v, k);
                }
            }
            Ok(v) => {
                pass = false;
                if !(v >= worst.0) {
                    worst = (v, k);
                }
            }
            Err(_) => {
                pass = false;
                worst = (f64::NAN, k);
            }
        }
    }
    ClaimReport { claim, points: grid.len(), worst_margin: worst.0, worst_at: worst.1, pass }
}

/// All floating-point positivity claims on grids of `uniform` points.
pub fn positivity_claims(uniform: usize) -> Vec<ClaimReport> {
    let per_end = (uniform / 10).max(10);
    let unit = verification_grid(0.0, 1.0, uniform, per_end);
    let kstar = find_kstar();
    let upper = 1.0 - 1e-6;
    let mut tail = verification_grid(kstar, upper, uniform, per_end);
    tail.push(kstar);
    tail.push(upper);
    let mut e1_grid = unit.clone();
    e1_grid.push(1.0);
    vec![
        scan_positive("e2 > 0 on (0, 1)", &unit, |k| Ok(e_expressions(&EllipticModulus::new(k)?, 0.0)?.e2)),
        scan_positive("e1 > 0 on (0, 1]", &e1_grid, |k| Ok(e_expressions(&EllipticModulus::new(k)?, 0.0)?.e1)),
        scan_positive("F1 third factor > 0 on [k*, 1 - 1e-6]", &tail, f1_third_factor),
        scan_positive("F2 > 0 on (0, 1)", &unit, f2),
        scan_positive("3(2 - k^2)K - 4E > 0 on (0, 1)", &unit, f2_middle_factor),
    ]
}
