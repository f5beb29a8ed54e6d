//! Exact computation with central hyperplane arrangements over cyclotomic
//! fields: intersection lattices, Poincaré polynomials, induction tables for
//! inductive freeness, and the reflection arrangements of the monomial and
//! exceptional groups used as test cases.

pub mod catalog;
pub mod exactnum;
pub mod exponents;
pub mod format;
pub mod freeness;
pub mod geometry;
pub mod lattice;
pub mod linalg;
pub mod syntax;

pub use exactnum::{CycNum, Rational};
pub use exponents::ExponentMultiset;
pub use geometry::{Arrangement, LinearForm};
