//! Likelihood geometry of squared linear models.
//!
//! A squared linear model assigns state `i` the probability
//! `ℓ_i(x)² / Σ_j ℓ_j(x)²` for linear forms `ℓ_1, …, ℓ_n` in `d` parameters.
//! Its combinatorics is that of the hyperplane arrangement of the forms:
//! every region of the real projective complement carries exactly one
//! critical point of the log-likelihood.
//!
//! Exact computations use [`Rational`]; numeric solvers use `f64`. Most
//! linear algebra is generic over [`Scalar`], so it runs unchanged on
//! `f32`, `f64` or rationals.

pub mod arrangement;
pub mod catalog;
pub mod degeneration;
pub mod dpp;
pub mod error;
pub mod geometry;
pub mod json;
pub mod linalg;
pub mod lp;
pub mod mle;
pub mod model;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Arbitrary-precision rational scalar.
pub type Rational = num_rational::BigRational;
/// Exact matrix.
pub type QMatrix = linalg::Matrix<Rational>;
/// Floating-point matrix.
pub type FMatrix = linalg::Matrix<f64>;
/// Polytope with exact vertices.
pub type ExactPolytope = geometry::Polytope<Rational>;
/// Polytope with floating-point vertices.
pub type FloatPolytope = geometry::Polytope<f64>;
