//! Invariants and closed-form orbits of the integrable limit
//! `xi' = eta, eta' = -xi zeta, zeta' = xi eta`.

use std::fmt;

use crate::elliptic::{complete, jacobi, EllipticModulus};
use crate::error::{Error, Result};

/// Which variables a state is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// `(X, Y, Z)` of the Lorenz equations.
    Original,
    /// `(xi, eta, zeta)` after the large-rho rescaling.
    Rescaled,
}

/// A point of the three-dimensional phase space with its frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State3 {
    pub frame: Frame,
    pub v: [f64; 3],
}

impl State3 {
    pub fn rescaled(xi: f64, eta: f64, zeta: f64) -> Self {
        Self { frame: Frame::Rescaled, v: [xi, eta, zeta] }
    }

    pub fn original(x: f64, y: f64, z: f64) -> Self {
        Self { frame: Frame::Original, v: [x, y, z] }
    }

    pub fn xi(&self) -> f64 {
        self.v[0]
    }

    pub fn eta(&self) -> f64 {
        self.v[1]
    }

    pub fn zeta(&self) -> f64 {
        self.v[2]
    }

    /// The symmetry `(x, y, z) -> (-x, -y, z)`.
    pub fn reflect(&self) -> Self {
        Self { frame: self.frame, v: [-self.v[0], -self.v[1], self.v[2]] }
    }

    pub fn require(&self, frame: Frame) -> Result<()> {
        if self.frame == frame {
            Ok(())
        } else {
            Err(Error::Frame(format!("expected {frame:?} state, got {:?}", self.frame)))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.iter().all(|x| x.is_finite())
    }
}

/// Values of the invariants `A = xi^2/2 - zeta` and `B = sqrt(eta^2 + zeta^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedPair {
    pub a: f64,
    pub b: f64,
}

impl ConservedPair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(b >= 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("invalid invariants (A, B) = ({a}, {b})")));
        }
        Ok(Self { a, b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `|A| < B`: symmetric periodic orbits.
    D1,
    /// `A > B`: pairs of asymmetric periodic orbits.
    D2,
    /// `A = B`: homoclinic loops of the saddle `(0, 0, -B)`.
    D3,
    /// `A = -B`: the equilibria `(0, 0, B)`.
    D4,
    EquilibriumLineB0,
    Unphysical,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn conserved(s: &State3) -> Result<ConservedPair> {
    s.require(Frame::Rescaled)?;
    let [xi, eta, zeta] = s.v;
    Ok(ConservedPair { a: 0.5 * xi * xi - zeta, b: eta.hypot(zeta) })
}

pub const DEFAULT_REGION_TOL: f64 = 1e-12;

pub fn classify_region(p: &ConservedPair, tol: f64) -> Region {
    let ConservedPair { a, b } = *p;
    let band = tol * b.max(1.0);
    if b <= band {
        return if a >= -band { Region::EquilibriumLineB0 } else { Region::Unphysical };
    }
    if (a - b).abs() < band || (tol == 0.0 && a == b) {
        Region::D3
    } else if (a + b).abs() < band || (tol == 0.0 && a == -b) {
        Region::D4
    } else if a < -b {
        Region::Unphysical
    } else if a > b {
        Region::D2
    } else {
        Region::D1
    }
}

/// Sign selecting one member of an asymmetric or homoclinic pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitTag {
    L1,
    L2Plus,
    L2Minus,
    L3Plus,
    L3Minus,
    EquilibriumLine,
}

/// An unperturbed orbit: its tag, invariants and elliptic modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitFamily {
    pub tag: OrbitTag,
    pub params: ConservedPair,
    pub modulus: EllipticModulus,
}

fn require_region(p: &ConservedPair, expected: Region, name: &'static str) -> Result<()> {
    let got = classify_region(p, DEFAULT_REGION_TOL);
    if got == expected {
        Ok(())
    } else {
        Err(Error::RegionMismatch { expected: name, got: got.to_string() })
    }
}

impl OrbitFamily {
    /// Symmetric orbit with `k1^2 = (A + B) / (2B)`.
    pub fn l1(p: ConservedPair) -> Result<Self> {
        require_region(&p, Region::D1, "D1")?;
        let modulus = EllipticModulus::from_complement((p.b - p.a) / (2.0 * p.b))?;
        Ok(Self { tag: OrbitTag::L1, params: p, modulus })
    }

    /// Symmetric orbit from its modulus and `B`; `A = B(1 - 2(1 - k^2))`.
    pub fn l1_from_modulus(modulus: EllipticModulus, b: f64) -> Result<Self> {
        let params = ConservedPair::new(b * (1.0 - 2.0 * modulus.complement()), b)?;
        if b <= 0.0 {
            return Err(Error::Domain("B must be positive".into()));
        }
        Ok(Self { tag: OrbitTag::L1, params, modulus })
    }

    /// Asymmetric orbit with `k2^2 = 2 / (1 + A/B)`.
    pub fn l2(p: ConservedPair, sign: Sign) -> Result<Self> {
        require_region(&p, Region::D2, "D2")?;
        let modulus = EllipticModulus::from_complement((p.a - p.b) / (p.a + p.b))?;
        Ok(Self { tag: l2_tag(sign), params: p, modulus })
    }

    /// Asymmetric orbit from its modulus and `B`; `A = B(2/k^2 - 1)`.
    pub fn l2_from_modulus(modulus: EllipticModulus, b: f64, sign: Sign) -> Result<Self> {
        if b <= 0.0 || modulus.m() == 0.0 {
            return Err(Error::Domain("B and k2 must be positive".into()));
        }
        let params = ConservedPair::new(b * (2.0 / modulus.m() - 1.0), b)?;
        Ok(Self { tag: l2_tag(sign), params, modulus })
    }

    pub fn l3(b: f64, sign: Sign) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::Domain(format!("homoclinic orbit needs B > 0, got {b}")));
        }
        let tag = match sign {
            Sign::Plus => OrbitTag::L3Plus,
            Sign::Minus => OrbitTag::L3Minus,
        };
        Ok(Self { tag, params: ConservedPair { a: b, b }, modulus: EllipticModulus::new(1.0)? })
    }

    pub fn eval(&self, tau: f64) -> Result<State3> {
        let b = self.params.b;
        match self.tag {
            OrbitTag::L1 => l1_state(&self.modulus, b, tau),
            OrbitTag::L2Plus => l2_state(&self.modulus, b, tau, Sign::Plus),
            OrbitTag::L2Minus => l2_state(&self.modulus, b, tau, Sign::Minus),
            OrbitTag::L3Plus => eval_l3(b, tau, Sign::Plus),
            OrbitTag::L3Minus => eval_l3(b, tau, Sign::Minus),
            OrbitTag::EquilibriumLine => Ok(State3::rescaled(0.0, 0.0, b)),
        }
    }

    /// Smallest `T > 0` with `eval(tau + T) = eval(tau)`. For L2 this is half
    /// of the period reported by [`period_action_frequency`].
    pub fn minimal_period(&self) -> Result<f64> {
        let paf = period_action_frequency(self)?;
        Ok(match self.tag {
            OrbitTag::L2Plus | OrbitTag::L2Minus => 0.5 * paf.period,
            _ => paf.period,
        })
    }
}

fn l2_tag(sign: Sign) -> OrbitTag {
    match sign {
        Sign::Plus => OrbitTag::L2Plus,
        Sign::Minus => OrbitTag::L2Minus,
    }
}

fn l1_state(md: &EllipticModulus, b: f64, tau: f64) -> Result<State3> {
    let sb = b.sqrt();
    let k = md.k();
    let j = jacobi(sb * tau, md)?;
    Ok(State3::rescaled(
        2.0 * k * sb * j.cn,
        -2.0 * k * b * j.dn * j.sn,
        b * (1.0 - 2.0 * md.m() * j.sn * j.sn),
    ))
}

fn l2_state(md: &EllipticModulus, b: f64, tau: f64, sign: Sign) -> Result<State3> {
    let sb = b.sqrt();
    let k = md.k();
    let s = sign.value();
    let j = jacobi(sb * tau / k, md)?;
    Ok(State3::rescaled(
        s * 2.0 * sb / k * j.dn,
        -s * 2.0 * b * j.sn * j.cn,
        b * (1.0 - 2.0 * j.sn * j.sn),
    ))
}

pub fn eval_l1(p: &ConservedPair, tau: f64) -> Result<State3> {
    OrbitFamily::l1(*p)?.eval(tau)
}

pub fn eval_l2(p: &ConservedPair, tau: f64, sign: Sign) -> Result<State3> {
    OrbitFamily::l2(*p, sign)?.eval(tau)
}

pub fn eval_l3(b: f64, tau: f64, sign: Sign) -> Result<State3> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!("homoclinic orbit needs B > 0, got {b}")));
    }
    let sb = b.sqrt();
    let u = sb * tau;
    let sech = 1.0 / u.cosh();
    let th = u.tanh();
    let s = sign.value();
    Ok(State3::rescaled(s * 2.0 * sb * sech, -s * 2.0 * b * th * sech, b * (1.0 - 2.0 * th * th)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodActionFrequency {
    pub period: f64,
    pub action: f64,
    pub omega: f64,
}

/// Period `T`, action `I` and frequency `1/T` of an L1 or L2 orbit.
pub fn period_action_frequency(f: &OrbitFamily) -> Result<PeriodActionFrequency> {
    let b = f.params.b;
    let sb = b.sqrt();
    let (period, action) = match f.tag {
        OrbitTag::L1 => {
            let (kk, ee) = complete(&f.modulus)?;
            (4.0 * kk / sb, 16.0 * sb * (ee - f.modulus.complement() * kk))
        }
        OrbitTag::L2Plus | OrbitTag::L2Minus => {
            let (kk, ee) = complete(&f.modulus)?;
            let k = f.modulus.k();
            (4.0 * kk * k / sb, 16.0 * sb * ee / k)
        }
        _ => return Err(Error::Domain(format!("{:?} has no finite period", f.tag))),
    };
    Ok(PeriodActionFrequency { period, action, omega: 1.0 / period })
}

/// Polar form of a rescaled state: `zeta = B cos(phi)`, `eta = B sin(phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polar {
    pub xi: f64,
    pub phi: f64,
    pub b: f64,
}

pub fn to_polar(s: &State3) -> Result<Polar> {
    s.require(Frame::Rescaled)?;
    let [xi, eta, zeta] = s.v;
    if eta == 0.0 && zeta == 0.0 {
        return Err(Error::Domain("angle undefined at B = 0".into()));
    }
    Ok(Polar { xi, phi: eta.atan2(zeta), b: eta.hypot(zeta) })
}

pub fn from_polar(p: &Polar) -> State3 {
    let (s, c) = p.phi.sin_cos();
    State3::rescaled(p.xi, p.b * s, p.b * c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conserved_examples() {
        let p = conserved(&State3::rescaled(0.0, 0.0, 1.0)).unwrap();
        assert_eq!((p.a, p.b), (-1.0, 1.0));
        let p = conserved(&State3::rescaled(2.0, 0.0, -1.0)).unwrap();
        assert_eq!((p.a, p.b), (3.0, 1.0));
        assert!(conserved(&State3::original(1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn regions() {
        let c = |a, b| classify_region(&ConservedPair { a, b }, DEFAULT_REGION_TOL);
        assert_eq!(c(0.5, 1.0), Region::D1);
        assert_eq!(c(3.0, 1.0), Region::D2);
        assert_eq!(c(1.0, 1.0), Region::D3);
        assert_eq!(c(-1.0, 1.0), Region::D4);
        assert_eq!(c(-2.0, 1.0), Region::Unphysical);
        assert_eq!(c(0.3, 0.0), Region::EquilibriumLineB0);
        assert_eq!(classify_region(&ConservedPair { a: 1.0 + 1e-13, b: 1.0 }, 0.0), Region::D2);
    }

    #[test]
    fn l1_start_point() {
        let p = ConservedPair::new(0.5, 2.0).unwrap();
        let f = OrbitFamily::l1(p).unwrap();
        let s = f.eval(0.0).unwrap();
        let k = f.modulus.k();
        assert!((s.xi() - 2.0 * k * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(s.eta(), 0.0);
        assert!((s.zeta() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn l2_region_mismatch() {
        let p = ConservedPair::new(0.5, 2.0).unwrap();
        assert!(matches!(OrbitFamily::l2(p, Sign::Plus), Err(Error::RegionMismatch { .. })));
    }

    #[test]
    fn l3_limits() {
        let s = eval_l3(2.0, 0.0, Sign::Plus).unwrap();
        assert!((s.xi() - 2.0 * 2f64.sqrt()).abs() < 1e-15 && (s.zeta() - 2.0).abs() < 1e-15);
        let s = eval_l3(2.0, 60.0, Sign::Plus).unwrap();
        assert!(s.xi().abs() < 1e-30 && (s.zeta() + 2.0).abs() < 1e-15);
        assert!(eval_l3(0.0, 1.0, Sign::Plus).is_err());
    }

    #[test]
    fn polar_examples() {
        let p = to_polar(&State3::rescaled(1.0, 0.0, 2.0)).unwrap();
        assert_eq!((p.xi, p.phi, p.b), (1.0, 0.0, 2.0));
        let p = to_polar(&State3::rescaled(0.0, 3.0, 0.0)).unwrap();
        assert!((p.phi - std::f64::consts::FRAC_PI_2).abs() < 1e-15 && p.b == 3.0);
        assert!(to_polar(&State3::rescaled(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn no_period_for_homoclinic() {
        let f = OrbitFamily::l3(1.0, Sign::Minus).unwrap();
        assert!(period_action_frequency(&f).is_err());
    }
}
