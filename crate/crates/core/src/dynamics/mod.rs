//! Time integration: Euler–Poincaré flows, group reconstruction, Pontryagin
//! extremals, closed forms and the objective.

mod closed_form;
mod euler_poincare;
mod extremal;
mod integrator;
mod quadrature;
mod trajectory;

pub use closed_form::{closed_form_symmetric, objective_value, SymmetricSolutionParams};
pub use euler_poincare::{
    euler_poincare_rhs, integrate_euler_poincare, reconstruct_group, sl2r_component_rhs, Frame,
};
pub use extremal::{
    closed_loop_rhs, feedback_solve, integrate_extremal, integrate_riccati,
    integrate_riccati_family, Control,
};
pub use integrator::{IntegratorConfig, Method, ESCAPE_NORM};
pub use quadrature::{central_difference, fourth_order_difference, simpson, Linear};
pub use trajectory::{Sample, Trajectory};
