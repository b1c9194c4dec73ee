//! Exact divergence-free polynomial fields on the square `[-1, 1]²`, their
//! trimming to shrunken boxes and mollification.

pub mod linalg;
pub mod mollifier;
pub mod poly;
pub mod solenoidal;
pub mod trim;

pub use linalg::{constraint_matrix, kernel_basis, IntMatrix};
pub use poly::{BoundedPoly2, PolyPair, RationalPoly2};
pub use solenoidal::{check_solenoidal, enumerate_solenoidal_polys, index_of, kernel_pairs, SolenoidalPolyPair};
pub use mollifier::{approximation_defect, mollifier_mass, mollify, MollifiedElement};
pub use trim::{trim, TrimmedField};
