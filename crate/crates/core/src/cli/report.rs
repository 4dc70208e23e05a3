use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::integrator::{Termination, Trajectory};
use crate::validation::ValidityReport;

pub const TRAJECTORY_HEADER: [&str; 5] = ["t_s", "phi_rad", "phi_dot_rad_s", "R_m", "energy_J"];

/// Summary of one simulation run. `simulated_period_s` and
/// `period_rel_diff` are `null` when fewer than two downward zero crossings
/// were observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationReport {
    pub analytic_omega_rad_s: f64,
    pub analytic_period_s: f64,
    pub simulated_period_s: Option<f64>,
    pub period_rel_diff: Option<f64>,
    pub energy_drift: f64,
    pub validity: ValidityReport,
    pub termination: Termination,
}

impl SimulationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Shortest round-trip scientific notation, e.g. `3.7333445631281e-7`.
pub fn sci(x: f64) -> String {
    format!("{x:e}")
}

/// Fixed-precision scientific notation with a signed two-digit exponent,
/// e.g. `3.7333e-07`.
pub fn sci_fixed(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let exp: i32 = exp.parse().expect("exponent");
            let sign = if exp < 0 { '-' } else { '+' };
            format!("{mantissa}e{sign}{:02}", exp.abs())
        }
        // inf / NaN
        None => s,
    }
}

pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for s in traj.samples() {
        w.write_record([sci(s.t), sci(s.phi), sci(s.phi_dot), sci(s.r), sci(s.energy)])?;
    }
    w.flush()?;
    Ok(())
}
