//! Impulse response of the scalar Klein–Gordon waveguide
//! `(c²∂x² − ∂t² − ω_co²) u = δ(x)δ(t)`, evaluated by closed form, by contour
//! integrals in the frequency plane and on the dispersion tube, by
//! asymptotics, and by an independent finite-difference simulation.

pub mod contour;
pub mod dispersion;
pub mod error;
pub mod fdtd;
pub mod field;
pub mod specfun;

pub use error::{Error, Result};
