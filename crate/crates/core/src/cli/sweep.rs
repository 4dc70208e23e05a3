//! One-parameter sweeps. Points are evaluated in parallel and written in
//! input order.

use std::io::Write;

use clap::ValueEnum;
use rayon::prelude::*;

use super::config::RunConfig;
use super::report::sci;
use super::CliError;
use crate::analytic::linear_period;
use crate::integrator::{estimate_period, integrate, Termination};
use crate::pendulum::State;
use crate::validation::validate;

pub const SWEEP_HEADER: [&str; 4] = ["param_value", "T_analytic_s", "T_simulated_s", "validity_verdict"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    #[value(name = "d_m")]
    D,
    #[value(name = "l_m")]
    L,
    #[value(name = "mass_kg")]
    Mass,
    #[value(name = "alpha0_m3")]
    Alpha0,
    #[value(name = "omega0_rad_s")]
    Omega0,
    #[value(name = "beta")]
    Beta,
    #[value(name = "phi0_rad")]
    Phi0,
}

impl SweepParam {
    pub fn apply(self, config: &mut RunConfig, value: f64) {
        let p = &mut config.params;
        match self {
            Self::D => p.d_m = value,
            Self::L => p.l_m = value,
            Self::Mass => p.mass_kg = value,
            Self::Alpha0 => p.alpha0_m3 = value,
            Self::Omega0 => p.omega0_rad_s = value,
            Self::Beta => p.beta = value,
            Self::Phi0 => config.initial.phi0_rad = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub log: bool,
}

impl SweepSpec {
    /// Grid values; the endpoints are reproduced exactly.
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let invalid = |field: &str, message: String| CliError::Invalid {
            field: field.to_string(),
            message,
        };
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return Err(invalid(
                "--from/--to",
                format!("need from < to, got {:e} and {:e}", self.from, self.to),
            ));
        }
        if self.points < 2 {
            return Err(invalid("--points", format!("need at least 2, got {}", self.points)));
        }
        if self.log && self.from <= 0.0 {
            return Err(invalid(
                "--from",
                format!("log sweep needs a positive start, got {:e}", self.from),
            ));
        }
        let n = self.points - 1;
        Ok((0..=n)
            .map(|i| {
                if i == 0 {
                    self.from
                } else if i == n {
                    self.to
                } else {
                    let f = i as f64 / n as f64;
                    if self.log {
                        self.from * (self.to / self.from).powf(f)
                    } else {
                        self.from + (self.to - self.from) * f
                    }
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub analytic_period: Option<f64>,
    pub simulated_period: Option<f64>,
    pub verdict: bool,
}

/// Evaluates one grid point. Points failing validation are not simulated.
pub fn evaluate_point(base: &RunConfig, param: SweepParam, value: f64) -> SweepRow {
    let mut config = base.clone();
    param.apply(&mut config, value);
    let mut row = SweepRow {
        value,
        analytic_period: None,
        simulated_period: None,
        verdict: false,
    };
    if config.check().is_err() {
        return row;
    }
    let Ok(params) = config.pendulum() else {
        return row;
    };
    row.analytic_period = Some(linear_period(&params));
    let phi0 = config.initial.phi0_rad;
    if !validate(&params, phi0, config.regime_margin).verdict {
        return row;
    }
    row.verdict = true;
    row.simulated_period = config
        .integrator
        .resolve(&params)
        .ok()
        .and_then(|cfg| integrate(&params, &State::at_rest(phi0), &cfg).ok())
        .filter(|traj| traj.termination() == Termination::Completed)
        .and_then(|traj| estimate_period(&traj).ok())
        .map(|est| est.mean_period);
    row
}

pub fn run_sweep(base: &RunConfig, spec: &SweepSpec) -> Result<Vec<SweepRow>, CliError> {
    let values = spec.values()?;
    Ok(values
        .par_iter()
        .map(|&v| evaluate_point(base, spec.param, v))
        .collect())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    let opt = |x: Option<f64>| x.map(sci).unwrap_or_default();
    for r in rows {
        w.write_record([
            sci(r.value),
            opt(r.analytic_period),
            opt(r.simulated_period),
            r.verdict.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
