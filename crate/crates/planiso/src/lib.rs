//! Plane-strain linear-elasticity toolkit for planar cubic materials.
//!
//! The crate evaluates closed-form fundamental solutions (point force,
//! concentrated couple, center of dilatation) for plane-strain cubic
//! elasticity, solves the corresponding traction problem on a square
//! domain with a small central hole using an in-house finite-element
//! solver, and identifies best-fit isotropic moduli `(mu_iso, kappa_iso)`
//! from the computed fields.  The fitted values can be compared against
//! the closed-form Euclidean and logarithmic closest-isotropic
//! projections of the cubic tensor.
//!
//! Modules:
//! - [`moduli`]: tensor parametrizations, Voigt matrices, distances and
//!   closest-isotropic projections;
//! - [`greens`]: closed-form fundamental solutions and induced tractions;
//! - [`fem`]: graded triangular mesh, constant-strain-triangle assembly,
//!   conjugate-gradient solve, and field evaluation;
//! - [`fitting`]: radial-norm and full-field least-squares moduli fits
//!   plus continuous (integral) minimizers;
//! - [`pipeline`]: scenario configuration, orchestration, and table
//!   reproduction used by the command-line front end.

pub mod fem;
pub mod fitting;
pub mod greens;
pub mod moduli;
pub mod pipeline;
