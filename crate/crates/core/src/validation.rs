//! Parameter estimates for an atomic nanostring and checks of a
//! configuration against the assumptions the model rests on.

use serde::{Deserialize, Serialize};

use crate::constants::{crossover_length, AVOGADRO};
use crate::cp_force::{AtomProperties, DEFAULT_BETA};
use crate::error::{domain, Result};
use crate::pendulum::{tip_distance, PendulumParams};

/// Polarizability volume assumed when none is given, m^3.
pub const DEFAULT_ALPHA0: f64 = 1e-30;
/// Transition angular frequency assumed when none is given, 1/s.
pub const DEFAULT_OMEGA0: f64 = 1e15;
/// Typical atomic radius, m; the tip must stay two of these off the plate.
pub const TYPICAL_ATOM_RADIUS: f64 = 1e-10;
pub const MIN_TIP_GAP: f64 = 2.0 * TYPICAL_ATOM_RADIUS;
/// Casimir-to-gravity torque ratio above which gravity counts as negligible.
pub const GRAVITY_NEGLIGIBLE_RATIO: f64 = 100.0;
/// Largest release angle treated as a small oscillation, rad.
pub const SMALL_ANGLE_LIMIT: f64 = 0.3;
/// Neighbouring atom centres sit three radii apart along the chain.
pub const SPACING_IN_RADII: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NanostringSpec {
    pub n_atoms: u32,
    /// m
    pub atom_radius: f64,
    /// g/mol
    pub atomic_weight: f64,
    /// m^3, defaults to [`DEFAULT_ALPHA0`]
    pub alpha0: Option<f64>,
    /// 1/s, defaults to [`DEFAULT_OMEGA0`]
    pub omega0: Option<f64>,
}

impl NanostringSpec {
    pub fn new(n_atoms: u32, atom_radius: f64, atomic_weight: f64) -> Self {
        Self {
            n_atoms,
            atom_radius,
            atomic_weight,
            alpha0: None,
            omega0: None,
        }
    }

    pub fn length(&self) -> f64 {
        f64::from(self.n_atoms) * SPACING_IN_RADII * self.atom_radius
    }

    /// Mass of one atom, kg.
    pub fn atom_mass(&self) -> f64 {
        self.atomic_weight / 1000.0 / AVOGADRO
    }

    pub fn mass(&self) -> f64 {
        f64::from(self.n_atoms) * self.atom_mass()
    }
}

/// Builds the pendulum for a chain of `n_atoms` hung with its tip `gap_r`
/// above the plate. The length is not rounded. Uses the default
/// restoring factor and includes gravity.
pub fn estimate_params(spec: &NanostringSpec, gap_r: f64) -> Result<PendulumParams> {
    if spec.n_atoms < 2 {
        return Err(domain(
            "n_atoms",
            f64::from(spec.n_atoms),
            "a chain needs at least 2 atoms",
        ));
    }
    if !(spec.atom_radius > 0.0 && spec.atom_radius.is_finite()) {
        return Err(domain("atom_radius", spec.atom_radius, "must be positive"));
    }
    if !(spec.atomic_weight > 0.0 && spec.atomic_weight.is_finite()) {
        return Err(domain("atomic_weight", spec.atomic_weight, "must be positive"));
    }
    if !(gap_r > 0.0 && gap_r.is_finite()) {
        return Err(domain("gap", gap_r, "tip-plate gap must be positive"));
    }
    let atom = AtomProperties::new(
        spec.alpha0.unwrap_or(DEFAULT_ALPHA0),
        spec.omega0.unwrap_or(DEFAULT_OMEGA0),
    )?;
    let l = spec.length();
    PendulumParams::new(l + gap_r, l, spec.mass(), atom, DEFAULT_BETA, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    /// `R(phi0) * margin <= c / omega0`.
    pub near_zone_ok: bool,
    /// `(c / omega0) / R(phi0)`.
    pub near_zone_ratio: f64,
    pub gravity_negligible: bool,
    /// Casimir over gravity torque coefficient at `phi = 0`.
    pub gravity_ratio: f64,
    /// `d > l` and `R(0) >= 2e-10 m`.
    pub geometry_ok: bool,
    /// `R(0)`, m.
    pub min_tip_distance_m: f64,
    pub small_angle_ok: bool,
    pub phi0_rad: f64,
    pub verdict: bool,
}

/// Checks the near-zone condition at the largest tip distance of the
/// swing, gravity negligibility, the tip clearance and the amplitude.
pub fn validate(params: &PendulumParams, phi0: f64, margin: f64) -> ValidityReport {
    let r_max = tip_distance(phi0.abs(), params);
    // AtomProperties guarantees omega0 > 0
    let crossover = crossover_length(params.atom().omega0()).unwrap_or(f64::NAN);
    let near_zone_ratio = crossover / r_max;
    let near_zone_ok = r_max * margin <= crossover;

    let gravity_ratio = params.casimir_coefficient() / params.gravity_coefficient();
    let gravity_negligible = gravity_ratio >= GRAVITY_NEGLIGIBLE_RATIO;

    let min_tip_distance_m = tip_distance(0.0, params);
    let geometry_ok = params.d() > params.l() && min_tip_distance_m >= MIN_TIP_GAP;

    let small_angle_ok = phi0.abs() <= SMALL_ANGLE_LIMIT;

    ValidityReport {
        near_zone_ok,
        near_zone_ratio,
        gravity_negligible,
        gravity_ratio,
        geometry_ok,
        min_tip_distance_m,
        small_angle_ok,
        phi0_rad: phi0,
        verdict: near_zone_ok && gravity_negligible && geometry_ok && small_angle_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn with(d: f64, l: f64, mass: f64, omega0: f64) -> PendulumParams {
        let atom = AtomProperties::new(1e-30, omega0).unwrap();
        PendulumParams::new(d, l, mass, atom, 2.0, true).unwrap()
    }

    #[test]
    fn thirty_atom_chain() {
        let spec = NanostringSpec::new(30, 1e-10, 60.22);
        let p = estimate_params(&spec, 1e-8).unwrap();
        assert_relative_eq!(p.l(), 9e-9, max_relative = 1e-15);
        assert_relative_eq!(spec.atom_mass(), 1e-25, max_relative = 1e-15);
        assert_relative_eq!(p.mass(), 3e-24, max_relative = 1e-15);
        assert_relative_eq!(p.d() - p.l(), 1e-8, max_relative = 1e-9);
        assert_eq!(p.atom().alpha0(), DEFAULT_ALPHA0);
        assert_eq!(p.atom().omega0(), DEFAULT_OMEGA0);
        assert_eq!(p.beta(), 2.0);
    }

    #[test]
    fn two_atom_chain() {
        let p = estimate_params(&NanostringSpec::new(2, 1e-10, 1.0), 1e-8).unwrap();
        assert_relative_eq!(p.l(), 6e-10, max_relative = 1e-15);
    }

    #[test]
    fn explicit_atom_data_override_defaults() {
        let mut spec = NanostringSpec::new(30, 1e-10, 12.0);
        spec.alpha0 = Some(2e-30);
        spec.omega0 = Some(3e15);
        let p = estimate_params(&spec, 1e-8).unwrap();
        assert_eq!(p.atom().alpha0(), 2e-30);
        assert_eq!(p.atom().omega0(), 3e15);
    }

    #[test]
    fn invalid_specs() {
        assert!(estimate_params(&NanostringSpec::new(1, 1e-10, 60.0), 1e-8).is_err());
        assert!(estimate_params(&NanostringSpec::new(30, 0.0, 60.0), 1e-8).is_err());
        assert!(estimate_params(&NanostringSpec::new(30, 1e-10, -1.0), 1e-8).is_err());
        assert!(estimate_params(&NanostringSpec::new(30, 1e-10, 60.0), 0.0).is_err());
        let mut spec = NanostringSpec::new(30, 1e-10, 60.0);
        spec.alpha0 = Some(-1.0);
        assert!(estimate_params(&spec, 1e-8).is_err());
    }

    #[test]
    fn default_design_passes() {
        let report = validate(&PendulumParams::reference_design(), 1e-3, 10.0);
        assert!(report.near_zone_ok);
        assert_relative_eq!(report.near_zone_ratio, 29.979, max_relative = 1e-4);
        assert!(report.gravity_negligible);
        assert_relative_eq!(report.gravity_ratio, 1.925_431_797e5, max_relative = 1e-9);
        assert!(report.geometry_ok);
        assert!(report.small_angle_ok);
        assert!(report.verdict);
    }

    #[test]
    fn far_pivot_leaves_near_zone() {
        let report = validate(&with(5e-7, 1e-8, 1e-24, 1e15), 1e-3, 10.0);
        assert!(!report.near_zone_ok);
        assert!(!report.verdict);
    }

    #[test]
    fn lower_transition_frequency_widens_near_zone() {
        let report = validate(&with(2e-8, 1e-8, 1e-24, 1e13), 1e-3, 10.0);
        assert!(report.near_zone_ok);
        assert_relative_eq!(report.near_zone_ratio, 2997.9, max_relative = 1e-4);
        assert!(report.verdict);
    }

    #[test]
    fn heavy_string_is_not_gravity_free() {
        let report = validate(&with(2e-8, 1e-8, 1e-18, 1e15), 1e-3, 10.0);
        assert!(!report.gravity_negligible);
        assert!(report.gravity_ratio < 1.0);
        assert!(!report.verdict);
    }

    #[test]
    fn tight_gap_and_large_angle() {
        let report = validate(&with(1.01e-8, 1e-8, 1e-24, 1e15), 0.31, 10.0);
        assert!(!report.geometry_ok);
        assert!(!report.small_angle_ok);
        assert!(!report.verdict);
        assert!(validate(&PendulumParams::reference_design(), 0.3, 10.0).small_angle_ok);
    }

    proptest! {
        #[test]
        fn estimate_is_homogeneous(n in 2u32..200, r in 1e-11f64..1e-9, w in 1.0f64..300.0) {
            let base = estimate_params(&NanostringSpec::new(n, r, w), 1e-8).unwrap();
            let wide = estimate_params(&NanostringSpec::new(n, 2.0 * r, w), 1e-8).unwrap();
            let heavy = estimate_params(&NanostringSpec::new(n, r, 2.0 * w), 1e-8).unwrap();
            prop_assert_eq!(wide.l(), 2.0 * base.l());
            prop_assert_eq!(heavy.mass(), 2.0 * base.mass());
        }

        #[test]
        fn verdict_monotone_in_margin(
            gap in 1e-9f64..1e-6,
            phi0 in 1e-4f64..0.3,
            m1 in 1.0f64..100.0,
            f in 0.0f64..1.0,
        ) {
            let p = with(1e-8 + gap, 1e-8, 1e-24, 1e15);
            let m2 = 1.0 + f * (m1 - 1.0);
            if validate(&p, phi0, m1).verdict {
                prop_assert!(validate(&p, phi0, m2).verdict);
            }
        }
    }
}
