//! Physical constants (SI, 2019 redefinition) and the near/far zone
//! crossover length.

use crate::error::{domain, Result};

/// Reduced Planck constant h/(2 pi), J s.
pub const HBAR: f64 = 1.054571817e-34;
/// Speed of light in vacuum, m/s (exact).
pub const C: f64 = 2.99792458e8;
/// Standard gravity, m/s^2 (exact by convention).
pub const G_ACCEL: f64 = 9.80665;
/// Avogadro number as used for the nanostring mass estimate.
pub const AVOGADRO: f64 = 6.022e23;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub c: f64,
    pub g_accel: f64,
}

pub fn constants() -> Constants {
    Constants {
        hbar: HBAR,
        c: C,
        g_accel: G_ACCEL,
    }
}

/// Distance `c / omega0` separating the near zone (R well below it) from
/// the retarded far zone (R well above it).
pub fn crossover_length(omega0: f64) -> Result<f64> {
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(domain("omega0", omega0, "must be positive and finite"));
    }
    Ok(C / omega0)
}
