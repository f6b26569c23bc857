//! Spherical cone-manifold structures on the torus knots `t(2n+1, 2)` and
//! torus links `t(2n, 2)`.
//!
//! The crate builds holonomy generators in the projective model of the
//! 3-sphere with Hermitian form `[[1, λ], [λ, 1]]`, picks `λ` from the
//! roots of Chebyshev polynomials, constructs the fundamental polyhedra and
//! checks them claim by claim, and computes singular geodesic lengths and
//! volumes by a closed form and by an independent geometric route.

pub mod angle;
pub mod chebyshev;
pub mod cone;
pub mod error;
pub mod exec;
pub mod export;
pub mod holonomy;
pub mod model;
pub mod polyhedron;
pub mod quadrature;
pub mod report;
pub mod scan;
pub mod verify;

pub use error::{DomainViolation, Error, Result};
pub use model::{Complex, EmbeddedPoint, Isometry, ModelParameter, ModelPoint, DEFAULT_TOL};
