//! Certified mild solutions of the two-dimensional incompressible
//! Navier–Stokes equations on the unit square.
//!
//! Every quantity is produced together with a rigorous error bound: exact
//! rational algebra for the divergence-free polynomial fields, outward-rounded
//! interval arithmetic for everything analytic.

pub mod approxcore;
pub mod error;
pub mod helmholtz;
pub mod nse;
pub mod polyfield;
pub mod spectral;
pub mod stokes;

pub use error::{Error, Result};
