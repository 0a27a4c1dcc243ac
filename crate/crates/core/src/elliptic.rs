//! Complete elliptic integrals and Jacobi elliptic functions.
//!
//! Everything is driven by the arithmetic-geometric mean. A modulus carries
//! `m = k^2` and `m1 = 1 - m` side by side so that callers who know the
//! complement exactly (orbits near the separatrix) never lose it to
//! cancellation.

use std::f64::consts::{FRAC_PI_2, LN_2};

use crate::error::{Error, Result};

/// Below this complement the AGM is replaced by the logarithmic asymptote.
const TINY_COMPLEMENT: f64 = 1e-280;

/// Elliptic modulus `k` with `m = k^2` and its complement stored together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus {
    k: f64,
    m: f64,
    m1: f64,
    ln_m1: f64,
}

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::Domain(format!("modulus k = {k} outside [0, 1]")));
        }
        let m1 = (1.0 - k) * (1.0 + k);
        Ok(Self { k, m: k * k, m1, ln_m1: m1.ln() })
    }

    /// Builds the modulus from `m1 = 1 - k^2`.
    pub fn from_complement(m1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m1) {
            return Err(Error::Domain(format!("complement {m1} outside [0, 1]")));
        }
        let m = 1.0 - m1;
        Ok(Self { k: m.sqrt(), m, m1, ln_m1: m1.ln() })
    }

    /// Builds the modulus from `s = -ln(1 - k^2)`, which resolves k
    /// arbitrarily close to one.
    pub fn from_log_complement(s: f64) -> Result<Self> {
        if s.is_nan() || s < 0.0 {
            return Err(Error::Domain(format!("log complement {s} must be >= 0")));
        }
        let m = -(-s).exp_m1();
        Ok(Self { k: m.sqrt(), m, m1: (-s).exp(), ln_m1: -s })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// `1 - k^2`.
    pub fn complement(&self) -> f64 {
        self.m1
    }

    /// `k' = sqrt(1 - k^2)`.
    pub fn kprime(&self) -> f64 {
        self.m1.sqrt()
    }

    /// `s = -ln(1 - k^2)`.
    pub fn log_complement(&self) -> f64 {
        -self.ln_m1
    }

    /// The complementary modulus `k'`.
    pub fn conjugate(&self) -> Self {
        Self { k: self.kprime(), m: self.m1, m1: self.m, ln_m1: self.m.ln() }
    }
}

/// Sn, cn and dn at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// `(K, E)` from one AGM sweep.
pub fn complete(modulus: &EllipticModulus) -> Result<(f64, f64)> {
    let m1 = modulus.m1;
    if modulus.ln_m1 == f64::NEG_INFINITY {
        return Err(Error::Divergence);
    }
    if m1 < TINY_COMPLEMENT {
        return Ok((2.0 * LN_2 - 0.5 * modulus.ln_m1, 1.0));
    }
    let mut a = 1.0_f64;
    let mut b = m1.sqrt();
    let mut sum = 0.5 * modulus.m;
    let mut pow = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        pow *= 2.0;
        sum += pow * c * c;
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        if (a - b).abs() <= 1e-15 * a {
            break;
        }
    }
    let k = FRAC_PI_2 / a;
    Ok((k, k * (1.0 - sum)))
}

pub fn ellip_k(modulus: &EllipticModulus) -> Result<f64> {
    complete(modulus).map(|(k, _)| k)
}

pub fn ellip_e(modulus: &EllipticModulus) -> f64 {
    complete(modulus).map(|(_, e)| e).unwrap_or(1.0)
}

/// Maclaurin coefficients of `2K/pi` and `2E/pi` in powers of `m`.
fn series_coefficients(n_terms: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = Vec::with_capacity(n_terms);
    let mut b = Vec::with_capacity(n_terms);
    let mut p = 1.0_f64;
    for n in 0..n_terms {
        if n > 0 {
            p *= (2 * n - 1) as f64 / (2 * n) as f64;
        }
        let an = p * p;
        a.push(an);
        b.push(an / (1.0 - 2.0 * n as f64));
    }
    (a, b)
}

/// Evaluates `p(m) K + q(m) E` for polynomials `p`, `q` in `m` (coefficients
/// in ascending order).
///
/// Combinations such as `(2 - m)K - 2E` vanish to high order at `m = 0`; for
/// small `m` the Maclaurin coefficients are combined first so the cancellation
/// happens exactly in the low orders.
pub fn ke_combination(p: &[f64], q: &[f64], modulus: &EllipticModulus) -> Result<f64> {
    let m = modulus.m;
    if m > 0.2 {
        let (kk, ee) = complete(modulus)?;
        return Ok(horner(p, m) * kk + horner(q, m) * ee);
    }
    let n_terms = 80;
    let (a, b) = series_coefficients(n_terms + p.len().max(q.len()));
    let mut sum = 0.0;
    let mut mp = 1.0;
    for n in 0..n_terms {
        let mut c = 0.0;
        for (j, pj) in p.iter().enumerate().filter(|(j, _)| *j <= n) {
            c += pj * a[n - j];
        }
        for (j, qj) in q.iter().enumerate().filter(|(j, _)| *j <= n) {
            c += qj * b[n - j];
        }
        let term = c * mp;
        sum += term;
        if n > p.len() + q.len() + 2 && term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        mp *= m;
        if mp == 0.0 {
            break;
        }
    }
    Ok(FRAC_PI_2 * sum)
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Jacobi elliptic functions by descending Landen transformation.
pub fn jacobi(u: f64, modulus: &EllipticModulus) -> Result<JacobiTriple> {
    if !u.is_finite() {
        return Err(Error::Domain(format!("argument u = {u} is not finite")));
    }
    let (m, m1) = (modulus.m, modulus.m1);
    if m1 == 0.0 {
        let sech = 1.0 / u.cosh();
        return Ok(JacobiTriple { sn: u.tanh(), cn: sech, dn: sech });
    }
    if m == 0.0 {
        return Ok(JacobiTriple { sn: u.sin(), cn: u.cos(), dn: 1.0 });
    }
    let quarter = ellip_k(modulus)?;
    let period = 4.0 * quarter;
    let u = u - period * (u / period).round();

    let mut a = [0.0_f64; 64];
    let mut c = [0.0_f64; 64];
    a[0] = 1.0;
    c[0] = modulus.k;
    let mut b = m1.sqrt();
    let mut n = 0;
    while c[n].abs() > 1e-16 * a[n] && n < 62 {
        let an = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        a[n + 1] = an;
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (m1 + m * cn * cn).sqrt();
    Ok(JacobiTriple { sn, cn, dn })
}

/// The modulus `k*` in `(0, 1)` where `K(k) = 2E(k)`.
pub fn find_kstar() -> f64 {
    let f = |k: f64| {
        let (kk, ee) = complete(&EllipticModulus::new(k).expect("k in (0,1)")).expect("k < 1");
        kk - 2.0 * ee
    };
    let (mut lo, mut hi) = (0.85_f64, 0.95_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn md(k: f64) -> EllipticModulus {
        EllipticModulus::new(k).unwrap()
    }

    #[test]
    fn zero_modulus() {
        let (k, e) = complete(&md(0.0)).unwrap();
        assert!((k - FRAC_PI_2).abs() < 1e-15);
        assert!((e - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn k_at_one_diverges() {
        assert_eq!(ellip_k(&md(1.0)), Err(Error::Divergence));
        assert_eq!(ellip_e(&md(1.0)), 1.0);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(EllipticModulus::new(1.5).is_err());
        assert!(EllipticModulus::new(-0.1).is_err());
        assert!(EllipticModulus::new(f64::NAN).is_err());
        assert!(EllipticModulus::from_log_complement(-1.0).is_err());
    }

    #[test]
    fn log_complement_matches_direct() {
        let a = md(0.7);
        let b = EllipticModulus::from_log_complement(a.log_complement()).unwrap();
        assert!((a.k() - b.k()).abs() < 1e-15);
        let (ka, ea) = complete(&a).unwrap();
        let (kb, eb) = complete(&b).unwrap();
        assert!((ka - kb).abs() < 1e-14 && (ea - eb).abs() < 1e-14);
    }

    #[test]
    fn deep_log_complement_uses_asymptote() {
        let md = EllipticModulus::from_log_complement(800.0).unwrap();
        let (k, e) = complete(&md).unwrap();
        assert!((k - (2.0 * LN_2 + 400.0)).abs() < 1e-12);
        assert_eq!(e, 1.0);
    }

    #[test]
    fn jacobi_quarter_period() {
        let md = md(0.6);
        let t = jacobi(ellip_k(&md).unwrap(), &md).unwrap();
        assert!((t.sn - 1.0).abs() < 1e-13);
        assert!(t.cn.abs() < 1e-12);
        assert!((t.dn - 0.8).abs() < 1e-13);
    }

    #[test]
    fn jacobi_limits() {
        let t = jacobi(0.7, &md(0.0)).unwrap();
        assert!((t.sn - 0.7_f64.sin()).abs() < 1e-15);
        let t = jacobi(0.7, &md(1.0)).unwrap();
        assert!((t.sn - 0.7_f64.tanh()).abs() < 1e-15);
        assert!((t.dn - 1.0 / 0.7_f64.cosh()).abs() < 1e-15);
    }

    #[test]
    fn series_combination_matches_leading_order() {
        // (2 - m)K - 2E = pi m^2 / 16 + O(m^3)
        let md = md(1e-4);
        let v = ke_combination(&[2.0, -1.0], &[-2.0], &md).unwrap();
        let lead = PI * md.m() * md.m() / 16.0;
        assert!((v / lead - 1.0).abs() < 1e-7);
    }

    #[test]
    fn series_combination_agrees_with_agm_at_switch() {
        let md = md(0.44);
        let (kk, ee) = complete(&md).unwrap();
        let m = md.m();
        let direct = (2.0 - m) * kk - 2.0 * ee;
        let series = ke_combination(&[2.0, -1.0], &[-2.0], &md).unwrap();
        assert!((direct - series).abs() < 1e-14);
    }
}
