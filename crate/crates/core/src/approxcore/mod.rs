//! Exact and outward-rounded arithmetic, approximation streams, validated
//! quadrature, special functions and the constants table.

pub mod bounded;
pub mod complex;
pub mod constants;
pub mod dyadic;
pub mod jet;
pub mod ledger;
pub mod name;
pub mod quad;
pub mod rational;
pub mod special;

pub use bounded::BoundedValue;
pub use complex::ComplexBounded;
pub use constants::{Constant, ConstantsOverride, ConstantsTable, Provenance};
pub use dyadic::Dyadic;
pub use jet::Jet;
pub use ledger::{BudgetLine, Certified, Ledger};
pub use name::{series_name, Name};
pub use quad::{integrate, integrate_with_breaks, QuadConfig};
pub use rational::Rational;
pub use special::{beta, gamma_tail};

/// `2^-k` as an exact float.
pub fn eps(k: i32) -> f64 {
    2f64.powi(-k)
}
