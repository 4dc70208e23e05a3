//! Time integration of the nonlinear equation of motion.
//!
//! The stepper works in dimensionless time `tau = omega_ref t` with state
//! `(phi, phi_dot / omega_ref)`, where `omega_ref` is the small-angle
//! frequency. Both components are O(1) for any physical configuration, so
//! the SI magnitudes (I ~ 1e-41 kg m^2, torques ~ 1e-27 N m) never enter
//! the step-size control.

use serde::{Deserialize, Serialize};

use crate::analytic::linear_omega;
use crate::error::{domain, Error, Result};
use crate::pendulum::{
    check_angle, moment_of_inertia, tip_distance, torque_casimir, torque_gravity, total_energy,
    PendulumParams, State,
};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_ABS_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_STEPS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical fourth-order Runge-Kutta with step `dt` in seconds.
    Rk4Fixed { dt: f64 },
    /// Embedded Dormand-Prince 4(5) pair with per-component tolerances on
    /// the dimensionless state.
    Rk45Adaptive { rel_tol: f64, abs_tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Absolute end time, s.
    pub t_max: f64,
    /// Budget of attempted steps (rejected adaptive steps count too).
    pub max_steps: usize,
    /// Record every n-th accepted step; first and last states are always kept.
    pub record_stride: usize,
}

impl IntegratorConfig {
    pub fn rk4(dt: f64, t_max: f64) -> Self {
        Self {
            method: Method::Rk4Fixed { dt },
            t_max,
            max_steps: DEFAULT_MAX_STEPS,
            record_stride: 1,
        }
    }

    pub fn rk45(t_max: f64) -> Self {
        Self::rk45_with_tol(t_max, DEFAULT_REL_TOL, DEFAULT_ABS_TOL)
    }

    pub fn rk45_with_tol(t_max: f64, rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            method: Method::Rk45Adaptive { rel_tol, abs_tol },
            t_max,
            max_steps: DEFAULT_MAX_STEPS,
            record_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            Method::Rk4Fixed { dt } => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(Error::Config(format!("dt must be positive, got {dt:e}")));
                }
            }
            Method::Rk45Adaptive { rel_tol, abs_tol } => {
                if !(rel_tol > 0.0 && abs_tol > 0.0) {
                    return Err(Error::Config(format!(
                        "rel_tol and abs_tol must be positive, got {rel_tol:e} and {abs_tol:e}"
                    )));
                }
            }
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Config(format!(
                "t_max must be positive, got {:e}",
                self.t_max
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::Config("record_stride must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Completed,
    Collision,
    StepLimit,
}

/// One recorded row: time (s), angle (rad), angular velocity (rad/s), tip
/// distance to the plate (m) and total energy (J).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub phi: f64,
    pub phi_dot: f64,
    pub r: f64,
    pub energy: f64,
}

impl Sample {
    fn new(state: &State, params: &PendulumParams) -> Result<Self> {
        Ok(Self {
            t: state.t,
            phi: state.phi,
            phi_dot: state.phi_dot,
            r: tip_distance(state.phi, params),
            energy: total_energy(state, params)?,
        })
    }

    pub fn state(&self) -> State {
        State::new(self.t, self.phi, self.phi_dot)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
    params: PendulumParams,
    termination: Termination,
}

impl Trajectory {
    /// Assembles a trajectory from externally produced samples. Times must be
    /// strictly increasing.
    pub fn from_samples(
        samples: Vec<Sample>,
        params: PendulumParams,
        termination: Termination,
    ) -> Result<Self> {
        if let Some(w) = samples.windows(2).find(|w| w[1].t <= w[0].t) {
            return Err(domain("t", w[1].t, "sample times must be strictly increasing"));
        }
        Ok(Self {
            samples,
            params,
            termination,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn params(&self) -> &PendulumParams {
        &self.params
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodEstimate {
    pub mean_period: f64,
    pub per_cycle_periods: Vec<f64>,
    pub cycles_observed: usize,
}

type Vec2 = [f64; 2];

/// Equation of motion in dimensionless variables.
struct ScaledSystem<'a> {
    params: &'a PendulumParams,
    omega_ref: f64,
    /// Converts a torque in N m into d(phi_dot/omega_ref)/dtau.
    torque_scale: f64,
}

impl<'a> ScaledSystem<'a> {
    fn new(params: &'a PendulumParams) -> Self {
        let omega_ref = linear_omega(params);
        Self {
            params,
            omega_ref,
            torque_scale: 1.0 / (moment_of_inertia(params) * omega_ref * omega_ref),
        }
    }

    fn rhs(&self, y: &Vec2) -> Result<Vec2> {
        check_angle(y[0])?;
        let torque = torque_gravity(y[0], self.params) + torque_casimir(y[0], self.params);
        Ok([y[1], torque * self.torque_scale])
    }

    fn to_scaled(&self, state: &State) -> Vec2 {
        [state.phi, state.phi_dot / self.omega_ref]
    }

    fn to_state(&self, t: f64, y: &Vec2) -> State {
        State::new(t, y[0], y[1] * self.omega_ref)
    }
}

fn axpy(y: &Vec2, h: f64, terms: &[(f64, &Vec2)]) -> Vec2 {
    let mut out = *y;
    for (coef, k) in terms {
        out[0] += h * coef * k[0];
        out[1] += h * coef * k[1];
    }
    out
}

fn rk4_scaled(sys: &ScaledSystem, y: &Vec2, h: f64) -> Result<Vec2> {
    let k1 = sys.rhs(y)?;
    let k2 = sys.rhs(&axpy(y, h, &[(0.5, &k1)]))?;
    let k3 = sys.rhs(&axpy(y, h, &[(0.5, &k2)]))?;
    let k4 = sys.rhs(&axpy(y, h, &[(1.0, &k3)]))?;
    Ok(axpy(
        y,
        h,
        &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
    ))
}

/// One classical Runge-Kutta step of size `dt` (s). A stage leaving
/// |phi| < pi/2 yields [`Error::Geometry`].
pub fn step_rk4(state: &State, params: &PendulumParams, dt: f64) -> Result<State> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(domain("dt", dt, "step must be positive"));
    }
    check_angle(state.phi)?;
    let sys = ScaledSystem::new(params);
    let y = rk4_scaled(&sys, &sys.to_scaled(state), dt * sys.omega_ref)?;
    Ok(sys.to_state(state.t + dt, &y))
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct DopriStep {
    y: Vec2,
    err: Vec2,
    /// Derivative at the new point, reused as the next first stage.
    k7: Vec2,
}

fn dopri_scaled(sys: &ScaledSystem, y: &Vec2, k1: &Vec2, h: f64) -> Result<DopriStep> {
    let k2 = sys.rhs(&axpy(y, h, &[(A21, k1)]))?;
    let k3 = sys.rhs(&axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = sys.rhs(&axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = sys.rhs(&axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
    let k6 = sys.rhs(&axpy(
        y,
        h,
        &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
    ))?;
    let y_new = axpy(
        y,
        h,
        &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = sys.rhs(&y_new)?;
    let err = axpy(
        &[0.0, 0.0],
        h,
        &[(E1, k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
    );
    Ok(DopriStep { y: y_new, err, k7 })
}

fn error_norm(step: &DopriStep, y: &Vec2, rel_tol: f64, abs_tol: f64) -> f64 {
    (0..2)
        .map(|i| {
            let scale = abs_tol + rel_tol * y[i].abs().max(step.y[i].abs());
            (step.err[i] / scale).abs()
        })
        .fold(0.0, f64::max)
}

// Initial dimensionless step for the adaptive method; the controller takes
// over from the first step.
const INITIAL_STEP: f64 = 1e-2;
const SAFETY: f64 = 0.9;

fn collided(y: &Vec2, params: &PendulumParams) -> bool {
    check_angle(y[0]).is_err() || tip_distance(y[0], params) <= 0.0 || !y[1].is_finite()
}

struct Recorder<'a> {
    sys: &'a ScaledSystem<'a>,
    t0: f64,
    stride: usize,
    samples: Vec<Sample>,
    accepted: usize,
    last_recorded: usize,
}

impl<'a> Recorder<'a> {
    fn push(&mut self, tau: f64, y: &Vec2) -> Result<()> {
        let state = self.sys.to_state(self.t0 + tau / self.sys.omega_ref, y);
        self.samples.push(Sample::new(&state, self.sys.params)?);
        self.last_recorded = self.accepted;
        Ok(())
    }

    fn accept(&mut self, tau: f64, y: &Vec2) -> Result<()> {
        self.accepted += 1;
        if self.accepted.is_multiple_of(self.stride) {
            self.push(tau, y)?;
        }
        Ok(())
    }

    /// Makes sure the most recent accepted state is on record.
    fn flush(&mut self, tau: f64, y: &Vec2) -> Result<()> {
        if self.last_recorded != self.accepted {
            self.push(tau, y)?;
        }
        Ok(())
    }
}

/// Integrates the full equation of motion from `initial` to `config.t_max`.
///
/// Tip contact or the string reaching the horizontal ends the run with
/// [`Termination::Collision`]; running out of steps ends it with
/// [`Termination::StepLimit`]. Both are reported in the trajectory rather
/// than as errors. The last recorded sample is always the last valid state.
pub fn integrate(
    params: &PendulumParams,
    initial: &State,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    config.validate()?;
    if !initial.is_finite() {
        return Err(domain("initial", f64::NAN, "initial state must be finite"));
    }
    check_angle(initial.phi)?;
    if config.t_max <= initial.t {
        return Err(Error::Config(format!(
            "t_max = {:e} s must be later than the initial time {:e} s",
            config.t_max, initial.t
        )));
    }

    let sys = ScaledSystem::new(params);
    let tau_end = (config.t_max - initial.t) * sys.omega_ref;
    let mut y = sys.to_scaled(initial);
    let mut tau = 0.0;
    let mut rec = Recorder {
        sys: &sys,
        t0: initial.t,
        stride: config.record_stride,
        samples: Vec::new(),
        accepted: 0,
        last_recorded: 0,
    };
    rec.push(0.0, &y)?;

    let mut attempts = 0usize;
    let termination = match config.method {
        Method::Rk4Fixed { dt } => {
            let h_nominal = dt * sys.omega_ref;
            loop {
                let remaining = tau_end - tau;
                if remaining <= 1e-9 * h_nominal {
                    break Termination::Completed;
                }
                if attempts == config.max_steps {
                    break Termination::StepLimit;
                }
                attempts += 1;
                let h = h_nominal.min(remaining);
                let y_new = match rk4_scaled(&sys, &y, h) {
                    Ok(v) if !collided(&v, params) => v,
                    Ok(_) | Err(Error::Geometry { .. }) => break Termination::Collision,
                    Err(e) => return Err(e),
                };
                y = y_new;
                tau = if h < h_nominal { tau_end } else { tau + h };
                rec.accept(tau, &y)?;
            }
        }
        Method::Rk45Adaptive { rel_tol, abs_tol } => {
            let mut h = INITIAL_STEP.min(tau_end);
            let mut k1 = sys.rhs(&y)?;
            loop {
                let remaining = tau_end - tau;
                if remaining <= 1e-12 * tau_end {
                    break Termination::Completed;
                }
                if attempts == config.max_steps {
                    break Termination::StepLimit;
                }
                attempts += 1;
                let last = h >= remaining;
                let h_try = if last { remaining } else { h };
                let step = match dopri_scaled(&sys, &y, &k1, h_try) {
                    Ok(s) => s,
                    Err(Error::Geometry { .. }) => break Termination::Collision,
                    Err(e) => return Err(e),
                };
                let err = error_norm(&step, &y, rel_tol, abs_tol);
                let factor = if err == 0.0 {
                    10.0
                } else if err.is_finite() {
                    (SAFETY * (1.0 / err).powf(0.2)).clamp(0.1, 10.0)
                } else {
                    0.1
                };
                if err <= 1.0 {
                    if collided(&step.y, params) {
                        break Termination::Collision;
                    }
                    y = step.y;
                    k1 = step.k7;
                    tau = if last { tau_end } else { tau + h_try };
                    rec.accept(tau, &y)?;
                }
                h = h_try * factor;
            }
        }
    };
    rec.flush(tau, &y)?;

    Ok(Trajectory {
        samples: rec.samples,
        params: *params,
        termination,
    })
}

/// Times at which `phi` crosses zero going downward (`phi_dot < 0`),
/// linearly interpolated between the bracketing samples.
pub fn downward_crossings(samples: &[Sample]) -> Vec<f64> {
    samples
        .windows(2)
        .filter(|w| w[0].phi > 0.0 && w[1].phi <= 0.0)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            a.t + (b.t - a.t) * a.phi / (a.phi - b.phi)
        })
        .collect()
}

pub fn estimate_period(traj: &Trajectory) -> Result<PeriodEstimate> {
    let crossings = downward_crossings(traj.samples());
    if crossings.len() < 2 {
        return Err(Error::InsufficientData {
            found: crossings.len(),
        });
    }
    let per_cycle_periods: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
    let cycles_observed = per_cycle_periods.len();
    let mean_period = per_cycle_periods.iter().sum::<f64>() / cycles_observed as f64;
    Ok(PeriodEstimate {
        mean_period,
        per_cycle_periods,
        cycles_observed,
    })
}

/// Largest relative deviation `|E(t) - E(0)| / |E(0)|` over the recorded
/// samples. Falls back to the absolute deviation when `E(0) == 0`.
pub fn energy_drift(traj: &Trajectory) -> f64 {
    let Some(first) = traj.samples().first() else {
        return 0.0;
    };
    let e0 = first.energy;
    let max_dev = traj
        .samples()
        .iter()
        .map(|s| (s.energy - e0).abs())
        .fold(0.0, f64::max);
    if e0 == 0.0 {
        max_dev
    } else {
        max_dev / e0.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::linear_period;
    use approx::assert_relative_eq;

    fn defaults() -> PendulumParams {
        PendulumParams::reference_design()
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::rk4(0.0, 1.0).validate().is_err());
        assert!(IntegratorConfig::rk45_with_tol(1.0, 0.0, 1e-12).validate().is_err());
        assert!(IntegratorConfig::rk45(-1.0).validate().is_err());
        let mut c = IntegratorConfig::rk45(1.0);
        c.record_stride = 0;
        assert!(c.validate().is_err());
        c.record_stride = 1;
        c.max_steps = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn integrate_rejects_bad_initial_state() {
        let p = defaults();
        let cfg = IntegratorConfig::rk45(1e-6);
        assert!(integrate(&p, &State::at_rest(1.6), &cfg).is_err());
        assert!(integrate(&p, &State::new(2e-6, 0.1, 0.0), &cfg).is_err());
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let p = defaults();
        let t = linear_period(&p);
        for cfg in [IntegratorConfig::rk45(5.0 * t), IntegratorConfig::rk4(t / 100.0, 5.0 * t)] {
            let traj = integrate(&p, &State::at_rest(0.0), &cfg).unwrap();
            assert_eq!(traj.termination(), Termination::Completed);
            assert!(traj.samples().iter().all(|s| s.phi == 0.0 && s.phi_dot == 0.0));
            assert!(energy_drift(&traj) <= 1e-14);
            assert_relative_eq!(traj.last().unwrap().t, 5.0 * t, max_relative = 1e-12);
        }
        let s = step_rk4(&State::at_rest(0.0), &p, 1e-9).unwrap();
        assert_eq!(s, State::new(1e-9, 0.0, 0.0));
    }

    #[test]
    fn rk4_single_step_restores() {
        let p = defaults();
        let s = step_rk4(&State::at_rest(1e-3), &p, linear_period(&p) / 1000.0).unwrap();
        assert!(s.phi < 1e-3);
        assert!(s.phi_dot < 0.0);
        assert!(step_rk4(&State::at_rest(1e-3), &p, 0.0).is_err());
        assert!(step_rk4(&State::at_rest(1.58), &p, 1e-9).is_err());
    }

    #[test]
    fn samples_carry_tip_distance_and_increasing_time() {
        let p = defaults();
        let traj = integrate(
            &p,
            &State::at_rest(0.2),
            &IntegratorConfig::rk45(3.0 * linear_period(&p)),
        )
        .unwrap();
        assert!(traj.len() > 10);
        assert!(traj.samples().windows(2).all(|w| w[1].t > w[0].t));
        for s in traj.samples() {
            assert_eq!(s.r, tip_distance(s.phi, &p));
        }
    }

    #[test]
    fn record_stride_keeps_endpoints() {
        let p = defaults();
        let t = linear_period(&p);
        let mut cfg = IntegratorConfig::rk4(t / 100.0, 2.0 * t);
        let full = integrate(&p, &State::at_rest(0.1), &cfg).unwrap();
        cfg.record_stride = 7;
        let thin = integrate(&p, &State::at_rest(0.1), &cfg).unwrap();
        assert_eq!(full.len(), 201);
        assert_eq!(thin.len(), 1 + 200 / 7 + 1);
        assert_eq!(thin.samples()[0], full.samples()[0]);
        assert_eq!(thin.last(), full.last());
        assert_eq!(thin.samples()[1], full.samples()[7]);
    }

    #[test]
    fn step_limit_is_reported() {
        let p = defaults();
        let mut cfg = IntegratorConfig::rk45(10.0 * linear_period(&p));
        cfg.max_steps = 5;
        let traj = integrate(&p, &State::at_rest(0.1), &cfg).unwrap();
        assert_eq!(traj.termination(), Termination::StepLimit);
        assert!(traj.last().unwrap().t < cfg.t_max);
    }

    #[test]
    fn fast_spin_ends_in_collision() {
        // kicked hard enough to swing the string past the horizontal
        let p = defaults();
        let t = linear_period(&p);
        let kick = State::new(0.0, 0.0, 50.0 * crate::analytic::linear_omega(&p));
        for cfg in [IntegratorConfig::rk45(t), IntegratorConfig::rk4(t / 500.0, t)] {
            let traj = integrate(&p, &kick, &cfg).unwrap();
            assert_eq!(traj.termination(), Termination::Collision);
            let last = traj.last().unwrap();
            assert!(last.phi.abs() < std::f64::consts::FRAC_PI_2);
            assert!(last.t < t);
        }
    }

    #[test]
    fn deterministic_trajectories() {
        let p = defaults();
        let cfg = IntegratorConfig::rk45(4.0 * linear_period(&p));
        let a = integrate(&p, &State::at_rest(0.05), &cfg).unwrap();
        let b = integrate(&p, &State::at_rest(0.05), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn period_of_known_sinusoid() {
        let samples: Vec<Sample> = (0..1000)
            .map(|i| {
                let t = 3.0 * i as f64 / 999.0;
                let w = std::f64::consts::TAU;
                Sample {
                    t,
                    phi: (w * t).cos(),
                    phi_dot: -w * (w * t).sin(),
                    r: 0.0,
                    energy: 0.0,
                }
            })
            .collect();
        let traj = Trajectory::from_samples(samples, defaults(), Termination::Completed).unwrap();
        let est = estimate_period(&traj).unwrap();
        assert_eq!(est.cycles_observed, 2);
        assert!((est.mean_period - 1.0).abs() < 1e-6);
        let mean = est.per_cycle_periods.iter().sum::<f64>() / 2.0;
        assert_eq!(mean, est.mean_period);
    }

    #[test]
    fn period_needs_two_crossings() {
        let p = defaults();
        let traj = integrate(
            &p,
            &State::at_rest(0.0),
            &IntegratorConfig::rk45(3.0 * linear_period(&p)),
        )
        .unwrap();
        assert_eq!(
            estimate_period(&traj),
            Err(Error::InsufficientData { found: 0 })
        );
    }

    #[test]
    fn from_samples_rejects_unordered_times() {
        let s = Sample {
            t: 1.0,
            phi: 0.0,
            phi_dot: 0.0,
            r: 1.0,
            energy: 1.0,
        };
        assert!(Trajectory::from_samples(vec![s, s], defaults(), Termination::Completed).is_err());
    }

    #[test]
    fn energy_drift_of_empty_trajectory() {
        let traj = Trajectory::from_samples(vec![], defaults(), Termination::Completed).unwrap();
        assert_eq!(energy_drift(&traj), 0.0);
    }
}
