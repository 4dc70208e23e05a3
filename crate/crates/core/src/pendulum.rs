//! Rigid nanostring pivoted at height `d` above the plate, tip atom at
//! distance `R = d - l cos(phi)`.
//!
//! Both torques are signed restoring torques (opposite sign to `phi`) and
//! the angular acceleration is their sum over `I = M l^2 / 3`.

use std::f64::consts::FRAC_PI_2;

use crate::constants::G_ACCEL;
use crate::cp_force::{check_beta, AtomProperties, DEFAULT_BETA};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumParams {
    d: f64,
    l: f64,
    mass: f64,
    atom: AtomProperties,
    beta: f64,
    include_gravity: bool,
}

impl PendulumParams {
    /// `d` pivot-to-plate distance (m), `l` string length (m), `mass` total
    /// string mass (kg). Requires `d > l > 0`, `mass > 0`, `beta` in [1, 2].
    pub fn new(
        d: f64,
        l: f64,
        mass: f64,
        atom: AtomProperties,
        beta: f64,
        include_gravity: bool,
    ) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(domain("l", l, "string length must be positive"));
        }
        if !(d > l && d.is_finite()) {
            return Err(domain("d", d, "pivot height must exceed the string length"));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(domain("M", mass, "string mass must be positive"));
        }
        check_beta(beta)?;
        Ok(Self {
            d,
            l,
            mass,
            atom,
            beta,
            include_gravity,
        })
    }

    /// Round order-of-magnitude design: 30-atom chain of length 1e-8 m and
    /// mass 1e-24 kg hung 1e-8 m above the plate, alpha0 = 1e-30 m^3,
    /// omega0 = 1e15 1/s, beta = 2, gravity on.
    pub fn reference_design() -> Self {
        let atom = AtomProperties::new(1e-30, 1e15).expect("valid atom");
        Self::new(2e-8, 1e-8, 1e-24, atom, DEFAULT_BETA, true).expect("valid defaults")
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn atom(&self) -> &AtomProperties {
        &self.atom
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn include_gravity(&self) -> bool {
        self.include_gravity
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        Self::new(self.d, self.l, self.mass, self.atom, beta, self.include_gravity)
    }

    pub fn with_gravity(self, include_gravity: bool) -> Self {
        Self {
            include_gravity,
            ..self
        }
    }

    /// Magnitude `M g l / 2` of the gravity torque per unit `sin(phi)`,
    /// independent of `include_gravity`.
    pub fn gravity_coefficient(&self) -> f64 {
        self.mass * G_ACCEL * self.l / 2.0
    }

    /// Magnitude of the Casimir torque per unit `sin(phi)` at tip distance `r`:
    /// `3 (1+beta) hbar omega0 alpha0 l / (32 pi r^4)`.
    pub fn casimir_coefficient_at(&self, r: f64) -> f64 {
        3.0 * (1.0 + self.beta) * self.atom.near_coefficient() * self.l / r.powi(4)
    }

    /// Casimir coefficient at equilibrium, `R = d - l`.
    pub fn casimir_coefficient(&self) -> f64 {
        self.casimir_coefficient_at(self.d - self.l)
    }
}

/// Dynamical state: time (s), angle from the vertical (rad) and angular
/// velocity (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub t: f64,
    pub phi: f64,
    pub phi_dot: f64,
}

impl State {
    pub fn new(t: f64, phi: f64, phi_dot: f64) -> Self {
        Self { t, phi, phi_dot }
    }

    /// Released from rest at `phi0` at `t = 0`.
    pub fn at_rest(phi0: f64) -> Self {
        Self::new(0.0, phi0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.phi.is_finite() && self.phi_dot.is_finite()
    }
}

pub(crate) fn check_angle(phi: f64) -> Result<()> {
    if phi.abs() < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::Geometry { phi: phi.abs() })
    }
}

pub fn tip_distance(phi: f64, params: &PendulumParams) -> f64 {
    params.d - params.l * phi.cos()
}

pub fn moment_of_inertia(params: &PendulumParams) -> f64 {
    params.mass * params.l * params.l / 3.0
}

/// `-M g (l/2) sin(phi)`, or zero with gravity switched off.
pub fn torque_gravity(phi: f64, params: &PendulumParams) -> f64 {
    if params.include_gravity {
        -params.gravity_coefficient() * phi.sin()
    } else {
        0.0
    }
}

/// Near-zone Casimir-Polder torque on the tip atom, scaled by `1 + beta`.
pub fn torque_casimir(phi: f64, params: &PendulumParams) -> f64 {
    -params.casimir_coefficient_at(tip_distance(phi, params)) * phi.sin()
}

/// Right-hand side `(dphi/dt, d^2phi/dt^2)` of the full nonlinear equation
/// of motion.
pub fn eom_rhs(state: &State, params: &PendulumParams) -> Result<(f64, f64)> {
    check_angle(state.phi)?;
    let torque = torque_gravity(state.phi, params) + torque_casimir(state.phi, params);
    Ok((state.phi_dot, torque / moment_of_inertia(params)))
}

/// `V(phi) = -M g (l/2) cos(phi) - (1+beta) alpha0 hbar omega0 / (32 pi R(phi)^3)`,
/// the antiderivative of the torques (`tau = -dV/dphi`).
pub fn potential_energy(phi: f64, params: &PendulumParams) -> Result<f64> {
    check_angle(phi)?;
    let r = tip_distance(phi, params);
    let casimir = -(1.0 + params.beta) * params.atom.near_coefficient() / (r * r * r);
    let gravity = if params.include_gravity {
        -params.gravity_coefficient() * phi.cos()
    } else {
        0.0
    };
    Ok(gravity + casimir)
}

pub fn total_energy(state: &State, params: &PendulumParams) -> Result<f64> {
    let kinetic = 0.5 * moment_of_inertia(params) * state.phi_dot * state.phi_dot;
    Ok(kinetic + potential_energy(state.phi, params)?)
}
