//! Constant mean curvature spheres in the Heisenberg group `Nil` and the
//! spinor energy functional.
//!
//! The crate is organised by subsystem:
//!
//! - [`nil_geometry`]: the ambient group, its left-invariant frame, the
//!   cylindrical metric, the Levi-Civita table and tangent-plane curvature.
//! - [`numerics`]: adaptive Gauss–Kronrod quadrature (finite and half-line),
//!   a Dormand–Prince 5(4) integrator with dense output, and finite-difference
//!   stencils.
//! - [`cmc_family`]: the closed-form sphere family `S_H` with its area,
//!   volume, spinor energy and Willmore value.
//! - [`weierstrass`]: spinor data on discrete conformal charts and residuals
//!   for every identity of the representation.
//! - [`revolution`]: profile curves in the quotient half-plane, the shooting
//!   ODE, and the functionals evaluated on sampled meridians.
//! - [`variational`]: the Euler–Lagrange residual, the criticality identities
//!   for cmc data, perturbations and a descent minimizer.
//! - [`s2xr`]: the companion computations in `S^2 x R`.
//! - [`report`] and [`cli`]: CSV/JSON report envelopes and the command line.

pub mod cli;
pub mod cmc_family;
pub mod error;
pub mod nil_geometry;
pub mod numerics;
pub mod report;
pub mod revolution;
pub mod s2xr;
pub mod variational;
pub mod weierstrass;

pub use error::{Error, Result};
pub use num_complex::Complex64;
