//! Orthogonally additive homogeneous polynomials on convolution algebras.
//!
//! Finite groups stand in for compact groups: their group algebras are
//! computed exactly through multiplication tables and hardcoded irreducible
//! unitary representations. The circle group is handled through truncated
//! trigonometric polynomials and quadrature on uniform grids.
//!
//! The main entry points are:
//!
//! - [`group`]: multiplication tables, irreps and their validation.
//! - [`fourier`]: the group algebra, its Fourier transform, central
//!   idempotents and the Banach norms used on it.
//! - [`polynomials`]: homogeneous polynomials, polarization and
//!   orthogonal-additivity testing.
//! - [`represent`]: extraction of the linear map `Φ` with `P(f) = Φ(f^{*n})`.
//! - [`pnorms`]: certificate-backed bounds for the decomposition norms.
//! - [`circle`]: Fejér kernels and the divergence diagnostics on the circle.

pub mod algebra;
pub mod canon;
pub mod circle;
pub mod error;
pub mod fourier;
pub mod group;
pub mod linalg;
pub mod pnorms;
pub mod polynomials;
pub mod represent;
pub mod rng;
pub mod selftest;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default tolerance for identities that are linear in the data.
pub const LINEAR_TOL: f64 = 1e-12;
/// Default tolerance for identities that are quadratic in the data.
pub const QUADRATIC_TOL: f64 = 1e-10;
