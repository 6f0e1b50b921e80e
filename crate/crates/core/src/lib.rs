//! Isotropic positive definite kernels on products of spheres `S^m x S^M`.
//!
//! A kernel is described through its double Gegenbauer expansion
//! `K_r(t, s) = sum a_{k,l} P_k^m(t) P_l^M(s)` with nonnegative summable
//! coefficients. The crate classifies such kernels as strictly positive
//! definite, strictly positive definite on point sets with distinct components
//! only, or merely positive definite, and builds explicit null directions of
//! Gram matrices whenever strictness fails.
//!
//! Modules:
//! - [`gegenbauer`]: polynomial evaluation, Gauss quadrature and expansions.
//! - [`kernel`]: coefficient schemes, truncated evaluation, support quadrants.
//! - [`classify`]: verdicts and the `S^inf -> S^m` dimension walk.
//! - [`geometry`]: product point sets, antipodal folding, Walsh block maps.
//! - [`witness`]: Gram matrices, residual systems and counterexample search.

pub mod classify;
pub mod error;
pub mod gegenbauer;
pub mod geometry;
pub mod kernel;
pub mod witness;

pub use classify::{classify, dimension_walk, Level, Verdict};
pub use error::{Error, Result};
pub use gegenbauer::{Degree, SphereDim};
pub use geometry::{ProductPoint, ProductPointSet, QuadrantVector};
pub use kernel::{CoefficientScheme, IndexQuadrants, PerQuadrant, Quadrant, SupportMask};
pub use witness::{GramReport, Witness};
