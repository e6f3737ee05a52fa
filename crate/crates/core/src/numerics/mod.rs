//! Quadrature, ODE integration and finite differences.

pub mod diff;
pub mod ode;
pub mod quadrature;

pub use diff::{
    central_first, central_second, cumulative_uniform, derivative, derivative_uniform,
    finite_difference, integrate_uniform, Jacobian,
};
pub use ode::{integrate, ode_solve, OdeOptions, OdeState, Trajectory};
pub use quadrature::{
    integrate_interval, integrate_interval_with, integrate_semi_infinite,
    integrate_semi_infinite_with, QuadOptions, QuadratureResult,
};
