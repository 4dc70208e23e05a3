//! Small-angle solution. Gravity is dropped unconditionally, so these
//! values ignore `include_gravity`.

use std::f64::consts::{PI, TAU};

use crate::pendulum::{moment_of_inertia, PendulumParams, State};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSolution {
    pub omega: f64,
    pub period: f64,
    pub phi0: f64,
}

impl AnalyticSolution {
    pub fn new(params: &PendulumParams, phi0: f64) -> Self {
        let omega = linear_omega(params);
        Self {
            omega,
            period: TAU / omega,
            phi0,
        }
    }

    /// Released from rest at `phi0`.
    pub fn state_at(&self, t: f64) -> State {
        let phase = self.omega * t;
        State::new(t, self.phi0 * phase.cos(), -self.phi0 * self.omega * phase.sin())
    }
}

fn stiffness_ratio(params: &PendulumParams) -> f64 {
    let atom = params.atom();
    let gap = params.d() - params.l();
    9.0 * (1.0 + params.beta()) * crate::constants::HBAR * atom.omega0() * atom.alpha0()
        / (32.0 * PI * params.mass() * params.l() * gap.powi(4))
}

/// `sqrt(9 (1+beta) hbar omega0 alpha0 / (32 pi M l (d-l)^4))`.
pub fn linear_omega(params: &PendulumParams) -> f64 {
    stiffness_ratio(params).sqrt()
}

/// `2 pi sqrt(32 pi M l (d-l)^4 / (9 (1+beta) hbar omega0 alpha0))`.
pub fn linear_period(params: &PendulumParams) -> f64 {
    TAU * stiffness_ratio(params).recip().sqrt()
}

pub fn harmonic_state(params: &PendulumParams, phi0: f64, t: f64) -> State {
    AnalyticSolution::new(params, phi0).state_at(t)
}

/// Energy of the linearized oscillator, `I/2 (phi_dot^2 + omega^2 phi^2)`.
pub fn linearized_energy(params: &PendulumParams, state: &State) -> f64 {
    let omega = linear_omega(params);
    0.5 * moment_of_inertia(params)
        * (state.phi_dot * state.phi_dot + omega * omega * state.phi * state.phi)
}
