//! Polynomials in the category of finite sets.
//!
//! A polynomial from `X` to `Y` is a diagram `X <- A -> B -> Y` of finite
//! functions. This crate builds the machinery needed to compose such
//! diagrams (pullbacks, dependent products, distributivity pullbacks), the
//! bicategory they form under cartesian morphisms, and evaluation of a
//! polynomial as a functor between slices. A symbolic front end translates
//! ordinary multivariate polynomials with natural coefficients into diagrams
//! and back, and serves as a counting oracle for everything else.

pub mod error;
pub mod extension;
pub mod finset;
pub mod gen;
pub mod json;
pub mod laws;
pub mod mutation;
pub mod poly;
pub mod slices;
pub mod symbolic;

pub use error::{Error, Result};
