//! Casimir-Polder interaction of a static polarized atom with a perfectly
//! conducting plate, in the two asymptotic regimes.
//!
//! Forces are signed radial components along increasing atom-plate
//! distance `R`, so attraction is negative and `F = -dU/dR` holds literally.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{crossover_length, C, HBAR};
use crate::error::{domain, Result};

/// Default factor used to read "much smaller/larger than".
pub const DEFAULT_REGIME_MARGIN: f64 = 10.0;

/// Default restoring-force factor; doubles the static force on the way in.
pub const DEFAULT_BETA: f64 = 2.0;

/// Polarizability and dominant transition frequency of the tip atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomProperties {
    alpha0: f64,
    omega0: f64,
}

impl AtomProperties {
    /// `alpha0` is the static polarizability as a volume (m^3), `omega0`
    /// the transition angular frequency (1/s).
    pub fn new(alpha0: f64, omega0: f64) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return Err(domain("alpha0", alpha0, "must be positive and finite"));
        }
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(domain("omega0", omega0, "must be positive and finite"));
        }
        Ok(Self { alpha0, omega0 })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Prefactor `alpha0 hbar omega0 / (32 pi)` of the near-zone potential, J m^3.
    pub(crate) fn near_coefficient(&self) -> f64 {
        self.alpha0 * HBAR * self.omega0 / (32.0 * PI)
    }

    /// Prefactor `3 alpha0 hbar c / (32 pi^2)` of the far-zone potential, J m^4.
    fn far_coefficient(&self) -> f64 {
        3.0 * self.alpha0 * HBAR * C / (32.0 * PI * PI)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeKind {
    Near,
    Intermediate,
    Far,
}

/// Outcome of [`classify_regime`], carrying the margin it was judged with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub kind: RegimeKind,
    pub margin: f64,
}

fn check_distance(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(domain("R", r, "atom-plate distance must be positive"))
    }
}

/// Near iff `R * margin <= c/omega0`, far iff `R >= margin * c/omega0`.
pub fn classify_regime(r: f64, atom: &AtomProperties, margin: f64) -> Result<Regime> {
    check_distance(r)?;
    if !(margin >= 1.0 && margin.is_finite()) {
        return Err(domain("margin", margin, "must be at least 1"));
    }
    let crossover = crossover_length(atom.omega0)?;
    let kind = if r * margin <= crossover {
        RegimeKind::Near
    } else if r >= margin * crossover {
        RegimeKind::Far
    } else {
        RegimeKind::Intermediate
    };
    Ok(Regime { kind, margin })
}

/// Non-retarded potential `-alpha0 hbar omega0 / (32 pi R^3)`.
pub fn potential_near(r: f64, atom: &AtomProperties) -> Result<f64> {
    check_distance(r)?;
    Ok(-atom.near_coefficient() / (r * r * r))
}

/// Retarded potential `-3 alpha0 hbar c / (32 pi^2 R^4)`.
pub fn potential_far(r: f64, atom: &AtomProperties) -> Result<f64> {
    check_distance(r)?;
    Ok(-atom.far_coefficient() / r.powi(4))
}

/// `-3 alpha0 hbar omega0 / (32 pi R^4)`.
pub fn force_near(r: f64, atom: &AtomProperties) -> Result<f64> {
    check_distance(r)?;
    Ok(-3.0 * atom.near_coefficient() / r.powi(4))
}

/// `-3 alpha0 hbar c / (8 pi^2 R^5)`.
pub fn force_far(r: f64, atom: &AtomProperties) -> Result<f64> {
    check_distance(r)?;
    Ok(-4.0 * atom.far_coefficient() / r.powi(5))
}

/// Potential in whichever asymptotic regime `R` falls into. The
/// intermediate zone has no closed form here and is refused.
pub fn potential(r: f64, atom: &AtomProperties, margin: f64) -> Result<f64> {
    match classify_regime(r, atom, margin)?.kind {
        RegimeKind::Near => potential_near(r, atom),
        RegimeKind::Far => potential_far(r, atom),
        RegimeKind::Intermediate => Err(domain(
            "R",
            r,
            "lies between the near and far zones where no asymptotic form applies",
        )),
    }
}

/// `1 + beta`: static attraction plus the restoring force `beta F_CP`.
pub fn total_restoring_factor(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(1.0 + beta)
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if (1.0..=2.0).contains(&beta) {
        Ok(())
    } else {
        Err(domain("beta", beta, "restoring factor must lie in [1, 2]"))
    }
}
