//! Vector fields of the Lorenz, rescaled Lorenz and Lorenz–Stenflo systems
//! and the change of frame between original and rescaled variables.

use crate::error::Result;
use crate::melnikov::Params;
use crate::orbits::{Frame, State3};

pub fn lorenz(y: &[f64; 3], sigma: f64, beta: f64, rho: f64) -> [f64; 3] {
    let [x, yy, z] = *y;
    [sigma * (yy - x), rho * x - yy - x * z, -beta * z + x * yy]
}

/// `(xi' , eta', zeta')` of the rescaled system.
pub fn rescaled(y: &[f64; 3], eps: f64, sigma: f64, beta: f64) -> [f64; 3] {
    let [xi, eta, zeta] = *y;
    [eta - eps * sigma * xi, -xi * zeta - eps * eta, xi * eta - eps * beta * (zeta + sigma)]
}

/// Lorenz–Stenflo in original variables `(X, Y, Z, V)` with rotation `s`.
pub fn stenflo(y: &[f64; 4], sigma: f64, beta: f64, rho: f64, s: f64) -> [f64; 4] {
    let [x, yy, z, v] = *y;
    [sigma * (yy - x) + s * v, rho * x - yy - x * z, -beta * z + x * yy, -x - sigma * v]
}

/// Lorenz–Stenflo in rescaled variables `(xi, eta, zeta, chi)`.
pub fn stenflo_rescaled(y: &[f64; 4], eps: f64, sigma: f64, beta: f64, s: f64) -> [f64; 4] {
    let [xi, eta, zeta, chi] = *y;
    [
        eta - eps * sigma * xi + eps * s * chi,
        -xi * zeta - eps * eta,
        xi * eta - eps * beta * (zeta + sigma),
        -eps * (xi + sigma * chi),
    ]
}

/// Jacobian of the rescaled field.
pub fn rescaled_jacobian(y: &[f64; 3], eps: f64, sigma: f64, beta: f64) -> [[f64; 3]; 3] {
    let [xi, eta, zeta] = *y;
    [[-eps * sigma, 1.0, 0.0], [-zeta, -eps, -xi], [eta, xi, -eps * beta]]
}

/// Jacobian of the rescaled Lorenz–Stenflo field.
pub fn stenflo_rescaled_jacobian(y: &[f64; 4], eps: f64, sigma: f64, beta: f64, s: f64) -> [[f64; 4]; 4] {
    let [xi, eta, zeta, _] = *y;
    [
        [-eps * sigma, 1.0, 0.0, eps * s],
        [-zeta, -eps, -xi, 0.0],
        [eta, xi, -eps * beta, 0.0],
        [-eps, 0.0, 0.0, -eps * sigma],
    ]
}

/// Lorenz vector field at an original-frame state.
pub fn rhs_lorenz(s: &State3, p: &Params) -> Result<State3> {
    s.require(Frame::Original)?;
    let rho = p.rho().ok_or_else(|| crate::Error::Domain("rho is required".into()))?;
    let d = lorenz(&s.v, p.sigma(), p.beta(), rho);
    Ok(State3 { frame: Frame::Original, v: d })
}

/// Rescaled vector field at a rescaled state.
pub fn rhs_rescaled(s: &State3, eps: f64, p: &Params) -> Result<State3> {
    s.require(Frame::Rescaled)?;
    Ok(State3 { frame: Frame::Rescaled, v: rescaled(&s.v, eps, p.sigma(), p.beta()) })
}

/// A state of the Lorenz–Stenflo system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State4 {
    pub frame: Frame,
    pub v: [f64; 4],
}

impl State4 {
    pub fn original(x: f64, y: f64, z: f64, v: f64) -> Self {
        Self { frame: Frame::Original, v: [x, y, z, v] }
    }

    pub fn rescaled(xi: f64, eta: f64, zeta: f64, chi: f64) -> Self {
        Self { frame: Frame::Rescaled, v: [xi, eta, zeta, chi] }
    }

    pub fn head(&self) -> State3 {
        State3 { frame: self.frame, v: [self.v[0], self.v[1], self.v[2]] }
    }
}

pub fn rhs_stenflo(s: &State4, p: &Params, s_rot: f64) -> Result<State4> {
    let v = match s.frame {
        Frame::Original => {
            let rho = p.rho().ok_or_else(|| crate::Error::Domain("rho is required".into()))?;
            stenflo(&s.v, p.sigma(), p.beta(), rho, s_rot)
        }
        Frame::Rescaled => stenflo_rescaled(&s.v, p.require_epsilon()?, p.sigma(), p.beta(), s_rot),
    };
    Ok(State4 { frame: s.frame, v })
}

/// `X = xi/eps`, `Y = eta/(eps^2 sigma)`, `Z = (zeta/sigma + 1)/eps^2`, `t = eps tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rescaling {
    pub eps: f64,
    pub sigma: f64,
}

impl Rescaling {
    pub fn new(rho: f64, sigma: f64) -> Self {
        Self { eps: 1.0 / rho.sqrt(), sigma }
    }

    pub fn from_params(p: &Params) -> Result<Self> {
        Ok(Self { eps: p.require_epsilon()?, sigma: p.sigma() })
    }

    pub fn to_rescaled(&self, s: &State3) -> Result<State3> {
        s.require(Frame::Original)?;
        Ok(State3::rescaled(self.xi(s.v[0]), self.eta(s.v[1]), self.zeta(s.v[2])))
    }

    pub fn to_original(&self, s: &State3) -> Result<State3> {
        s.require(Frame::Rescaled)?;
        Ok(State3::original(self.x(s.v[0]), self.y(s.v[1]), self.z(s.v[2])))
    }

    pub fn x(&self, xi: f64) -> f64 {
        xi / self.eps
    }

    pub fn y(&self, eta: f64) -> f64 {
        eta / (self.eps * self.eps * self.sigma)
    }

    pub fn z(&self, zeta: f64) -> f64 {
        (zeta / self.sigma + 1.0) / (self.eps * self.eps)
    }

    pub fn xi(&self, x: f64) -> f64 {
        x * self.eps
    }

    pub fn eta(&self, y: f64) -> f64 {
        y * self.eps * self.eps * self.sigma
    }

    pub fn zeta(&self, z: f64) -> f64 {
        self.sigma * (z * self.eps * self.eps - 1.0)
    }

    pub fn time(&self, tau: f64) -> f64 {
        self.eps * tau
    }

    pub fn tau(&self, t: f64) -> f64 {
        t / self.eps
    }
}

/// Rescaling of a state in the original frame.
pub fn rescale_map(s: &State3, rho: f64, sigma: f64) -> Result<State3> {
    Rescaling::new(rho, sigma).to_rescaled(s)
}

/// Inverse of [`rescale_map`].
pub fn unscale_map(s: &State3, rho: f64, sigma: f64) -> Result<State3> {
    Rescaling::new(rho, sigma).to_original(s)
}

/// The nonzero equilibrium `X+` in the original frame.
pub fn x_plus(rho: f64, beta: f64) -> State3 {
    let a = (beta * (rho - 1.0)).max(0.0).sqrt();
    State3::original(a, a, rho - 1.0)
}
