//! Generalized Hamming weights of Cartesian square-free evaluation codes.
//!
//! The weight hierarchy of a code is computed by exact search over
//! subspaces, by an independent search over coordinate sets, by minimising
//! monomial shadows (the footprint bound) and by closed formulas. The
//! modules mirror those routes:
//!
//! * [`field`], [`linalg`], [`combinatorics`]: arithmetic and counting.
//! * [`cartesian`], [`projective`]: code constructions.
//! * [`footprint`], [`ghw`], [`formulas`]: the three ways to get `d_r`.

pub mod cartesian;
pub mod combinatorics;
pub mod exec;
pub mod field;
pub mod footprint;
pub mod formulas;
pub mod ghw;
pub mod linalg;
pub mod projective;

pub use exec::{Execution, SearchOptions};
pub use field::Field;
pub use linalg::Matrix;

pub(crate) fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}
