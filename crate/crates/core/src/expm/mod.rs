//! Exact time stepping for `u' = A u`: the action `exp(τA) b` by truncated
//! Taylor polynomials with a relative backward-error bound, a dense
//! reference for tests, and the stepping loop with conservation diagnostics.

mod action;
mod dense;
mod evolve;
mod kernel;
mod theta;

pub use action::{expm_action, ExpmAction, TaylorPlan};
pub use dense::{dense_expm_reference, DENSE_REFERENCE_MAX_DIM};
pub use evolve::{evolve, EvolutionTrace, StepperConfig};
pub use theta::{taylor_theta, ThetaTable, MAX_TAYLOR_DEGREE};

/// Unit roundoff of `f64`, the default backward-error tolerance.
pub const DOUBLE_TOL: f64 = 1.1102230246251565e-16;
