//! Exhaustive search and classification of finite semifields of order `p^d`.

pub mod algebra;
pub mod census;
pub mod classify;
pub mod error;
pub mod gf;
pub mod search;

pub use algebra::{Algebra, Element, StandardSet};
pub use classify::{CanonicalKey, Fraction, PlaneClassRecord};
pub use error::{Error, Result};
pub use gf::{FieldSpec, MatrixGF, PolyGF, VectorGF};
