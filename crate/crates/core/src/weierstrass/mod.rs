//! Spinor (Weierstrass) representation data on discrete conformal charts.
//!
//! Conventions: `∂ = ½(∂x − i∂y)`, `∂̄ = ½(∂x + i∂y)`; `f⁻¹f_z = Σ Z_k e_k`;
//! `e^α = |ψ₁|² + |ψ₂|²` and the induced metric is `e^{2α} dz dz̄`.
//!
//! Spinors are recovered from an immersion rather than evolved: a grid samples
//! `Z`, takes continuous square roots, and [`SpinorGrid::dress`] then fills
//! the potentials and Hopf data so that each identity can be checked.

mod chart;
mod dressing;
mod grid;
mod io;
mod residuals;
mod spinor;
mod study;

pub use chart::{Chart, ChartKind, CmcSphereImmersion, FnImmersion, Immersion, ImmersionJet};
pub use dressing::dressing;
pub use grid::{FieldOps, SpinorGrid, ISOTROPY_TOL, SPINOR_FLOOR};
pub use io::{write_grid_csv, GRID_COLUMNS};
pub use residuals::{
    identity_residual_fields, identity_residuals, main_equation_pointwise, main_equation_residual,
    metric_from_n3, metric_from_n3_field, IdentityResiduals, ResidualFields,
};
pub use spinor::{
    atilde, exp_alpha, frame_components, isotropy_defect, normal, potential, spinor_from_z,
    z_from_spinor, PotentialValue,
};
pub use study::{
    common_nodes, identity_study, main_equation_analytic, observed_order, refinement_ladder,
    sphere_patch_chart, sphere_patch_grid, IdentityStudy, SPHERE_PATCH,
};
