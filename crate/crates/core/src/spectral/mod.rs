//! Spectral layer on the canonical square `(0, 1)²`: coefficient images,
//! Sobolev norms, certified differentiation and multiplication.

pub mod basis;
pub mod field;
pub mod ghat;
pub mod images;
pub mod moments;
pub mod names;
pub mod ops;
pub mod pair;

pub use basis::{Axis, Basis};
pub use field::FourierField;
pub use images::{coefficients, coefficients_to_precision, Func1, SeparableSum, Source};
pub use pair::PairField;
pub use names::{differentiate, multiply, Approximant, SobolevName, SourceSpec};
