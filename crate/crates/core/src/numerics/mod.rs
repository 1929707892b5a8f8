//! Shared numerical kernels.

mod diff;
mod interval;
mod quad;
mod roots;
mod special;
mod taylor;

pub use diff::{derivative, second_derivative, step_inside};
pub use interval::Interval;
pub use quad::{integrate, integrate_periodic_tail, integrate_with_error, QuadratureSpec};
pub use roots::{brent, solve_monotone};
pub use special::{dilog, exprel, exprel2, ln_gamma, gamma};
pub use taylor::{taylor_coeffs, TaylorSpec};
