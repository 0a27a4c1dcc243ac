//! Large-Rayleigh-number analysis of the Lorenz '63 equations.

pub mod appendix;
pub mod elliptic;
pub mod error;
pub mod melnikov;
pub mod odesim;
pub mod orbits;
pub mod quadrature;
pub mod shooting;
pub mod stenflo;
pub mod transport;

pub use elliptic::{EllipticModulus, JacobiTriple};
pub use error::{Error, Result};
pub use melnikov::{Branch, BranchPoint, Params};
pub use orbits::{ConservedPair, Frame, OrbitFamily, OrbitTag, Region, Sign, State3};
pub use odesim::{State4, Trajectory};
