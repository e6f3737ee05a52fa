//! Surfaces of revolution about the `z`-axis, described by meridians in the
//! quotient half-plane `B = {(u, v) : u ≥ 0}` with metric
//! `du² + 4u²/(4u²+u⁴) dv²`. Here `u = ρ` and `v = h` are the cylindrical
//! coordinates of the ambient group, `s` is arclength and `σ` the angle of the
//! meridian with `∂/∂u`, so that `u̇ = cosσ` and `v̇ = ½√(4+u²) sinσ`.
//!
//! Functionals expect a uniform arclength sampling; use
//! [`ProfileCurve::resample`] on other input.

mod curve;
mod functionals;
mod shooting;
mod topology;

pub(crate) use curve::{read_profile_csv, write_profile_csv};
pub use curve::{ProfileCurve, ProfileSample, Topology, UNIFORM_TOL};
pub use functionals::{
    area_and_volume, energy_direct, energy_imaginary, energy_reduced, geometry_fields, int_khat,
    revolution_report, willmore_direct, Estimate, GeometryFields, RevolutionReport,
};
pub use shooting::{
    closed_form_distance, generate_cmc_profile, generate_cmc_profile_with, ode_rhs, pole_offset,
    pole_start, ProfileOptions, ShootingReport,
};
pub use topology::{closure_and_topology, self_intersection, ClosureDiagnostics, TOPOLOGY_TOL};
