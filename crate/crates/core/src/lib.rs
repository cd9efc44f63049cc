//! Exact normal forms for pairs `(ω, f)` of a Martinet 2-form and a
//! quasihomogeneous boundary singularity on the plane.
//!
//! The algebra is generic over a coefficient field ([`Scalar`]); the aliases
//! below fix it to exact rationals, which is what every certificate in the
//! crate is checked over. The flux oracle in [`flux`] works in floating point.

pub mod classifier;
pub mod error;
pub mod flux;
pub mod form;
pub mod francoise;
pub mod json;
pub mod local;
pub mod map;
pub mod normalizer;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
pub use weights::WeightSystem;

pub use poly::Monomial;

/// Exact bivariate polynomial.
pub type Poly = poly::Polynomial<Rational>;
/// Exact differential form.
pub type Form = form::DifferentialForm<Rational>;
/// Exact truncated power series.
pub type SeriesT = series::Series<Rational>;
/// Exact truncated plane map.
pub type PlaneMap = map::PlaneMap<Rational>;
/// Boundary germ over the rationals.
pub type BoundaryGerm = local::BoundaryGerm<Rational>;
/// Decomposition result over the rationals.
pub type DecompositionResult = francoise::DecompositionResult<Rational>;

/// Double precision polynomial, for numerical evaluation.
pub type PolyF64 = poly::Polynomial<f64>;
