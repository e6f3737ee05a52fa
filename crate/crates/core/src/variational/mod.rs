//! Criticality of the spinor energy: the Euler–Lagrange residual on spinor
//! grids, the pointwise identities behind criticality of cmc data, and a
//! constrained descent over sphere meridians.

mod el;
mod minimize;
mod perturb;

pub use el::{
    criticality_identities, el_residual, el_residual_fields, el_study, CriticalityIdentities,
    ElResidualField, ElStudy,
};
pub use minimize::{
    minimize_energy, DescentTrace, MinimizeOptions, MinimizeOutcome, MinimizeStatus, TraceRow,
};
pub use perturb::perturb;
