//! Casimir atomic pendulum: a rigid atomic nanostring whose polarized tip
//! atom is pulled toward a conducting plate by the Casimir-Polder force.
//!
//! The crate provides the atom-plate potentials and forces, the pendulum
//! equation of motion, its small-angle solution, an integrator for the full
//! nonlinear dynamics with period and energy diagnostics, parameter
//! estimation and regime checks, and the file formats used by the CLI.

pub mod analytic;
pub mod cli;
pub mod constants;
pub mod cp_force;
pub mod error;
pub mod integrator;
pub mod pendulum;
pub mod validation;

pub use analytic::{harmonic_state, linear_omega, linear_period, AnalyticSolution};
pub use constants::{constants, crossover_length, Constants};
pub use cp_force::{AtomProperties, Regime, RegimeKind};
pub use error::{Error, Result};
pub use integrator::{
    energy_drift, estimate_period, integrate, step_rk4, IntegratorConfig, Method, PeriodEstimate,
    Sample, Termination, Trajectory,
};
pub use pendulum::{PendulumParams, State};
pub use validation::{estimate_params, validate, NanostringSpec, ValidityReport};
