//! Command-line layer: configuration files, report and trajectory
//! serialization, and the subcommand implementations used by the binary.
//!
//! Commands write human-facing output to the `out` writer they are given so
//! that they can be driven from tests as well as from `main`.

pub mod config;
pub mod report;
pub mod sweep;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{ParamsConfig, RunConfig};
pub use report::SimulationReport;
pub use sweep::{SweepParam, SweepRow, SweepSpec};

use crate::analytic::{linear_omega, linear_period};
use crate::error::Error;
use crate::integrator::{energy_drift, estimate_period, integrate, Termination, Trajectory};
use crate::pendulum::State;
use crate::validation::{estimate_params, validate, NanostringSpec};
use report::sci_fixed;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] Error),
}

/// Process exit status for usage and configuration errors.
pub const EXIT_USAGE: u8 = 1;
/// Process exit status when a run ends in a collision or hits the step limit.
pub const EXIT_PHYSICS: u8 = 2;

pub fn exit_code(termination: Termination) -> u8 {
    match termination {
        Termination::Completed => 0,
        Termination::Collision | Termination::StepLimit => EXIT_PHYSICS,
    }
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |e| CliError::Write {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

fn stdout_err(source: std::io::Error) -> CliError {
    CliError::Write {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(write_err(path))
}

/// Validate, integrate from rest at `phi0`, measure the period and the
/// energy drift.
pub fn run_simulation(config: &RunConfig) -> Result<(Trajectory, SimulationReport), CliError> {
    config.check()?;
    let params = config.pendulum()?;
    let phi0 = config.initial.phi0_rad;
    let validity = validate(&params, phi0, config.regime_margin);
    let integrator = config.integrator.resolve(&params)?;
    let traj = integrate(&params, &State::at_rest(phi0), &integrator)?;

    let analytic_period_s = linear_period(&params);
    let simulated_period_s = estimate_period(&traj).ok().map(|e| e.mean_period);
    let report = SimulationReport {
        analytic_omega_rad_s: linear_omega(&params),
        analytic_period_s,
        simulated_period_s,
        period_rel_diff: simulated_period_s
            .map(|t| (t - analytic_period_s).abs() / analytic_period_s),
        energy_drift: energy_drift(&traj),
        validity,
        termination: traj.termination(),
    };
    Ok((traj, report))
}

/// Writes the trajectory CSV (when a path is known) and the report JSON
/// (to `report_path`, or to `out` otherwise). Explicit paths override the
/// config's `outputs` section.
pub fn cmd_simulate(
    config: &RunConfig,
    csv_path: Option<&Path>,
    report_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<Termination, CliError> {
    let (traj, report) = run_simulation(config)?;
    let csv_path = csv_path.or(config.outputs.trajectory_csv.as_deref());
    let report_path = report_path.or(config.outputs.report_json.as_deref());

    if let Some(path) = csv_path {
        let file = create(path)?;
        report::write_trajectory_csv(&traj, file).map_err(csv_err(path))?;
    }
    let json = report.to_json();
    match report_path {
        Some(path) => {
            let mut file = create(path)?;
            file.write_all(json.as_bytes())
                .and_then(|_| file.flush())
                .map_err(write_err(path))?;
        }
        None => out.write_all(json.as_bytes()).map_err(stdout_err)?,
    }
    Ok(report.termination)
}

/// Prints the small-angle frequency and period, and with `simulate` the
/// period measured on the full dynamics.
pub fn cmd_period(
    config: &RunConfig,
    simulate: bool,
    out: &mut dyn Write,
) -> Result<Termination, CliError> {
    config.check()?;
    let params = config.pendulum()?;
    let mut text = format!(
        "omega_analytic = {} rad/s\nT_analytic = {} s\n",
        sci_fixed(linear_omega(&params), 4),
        sci_fixed(linear_period(&params), 4)
    );
    let mut termination = Termination::Completed;
    if simulate {
        let (_, report) = run_simulation(config)?;
        termination = report.termination;
        match report.simulated_period_s {
            Some(t) => text.push_str(&format!(
                "T_simulated = {} s\nperiod_rel_diff = {}\n",
                sci_fixed(t, 4),
                sci_fixed(report.period_rel_diff.unwrap_or(f64::NAN), 3)
            )),
            None => text.push_str("T_simulated = n/a\n"),
        }
    }
    out.write_all(text.as_bytes()).map_err(stdout_err)?;
    Ok(termination)
}

pub fn cmd_sweep(config: &RunConfig, spec: &SweepSpec, out_path: &Path) -> Result<(), CliError> {
    config.check()?;
    let rows = sweep::run_sweep(config, spec)?;
    let file = create(out_path)?;
    sweep::write_sweep_csv(&rows, file).map_err(csv_err(out_path))
}

pub fn cmd_validate(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    config.check()?;
    let params = config.pendulum()?;
    let report = validate(&params, config.initial.phi0_rad, config.regime_margin);
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    out.write_all(json.as_bytes()).map_err(stdout_err)
}

/// Prints the estimated parameters in the `params` section format.
pub fn cmd_estimate(
    spec: &NanostringSpec,
    gap_m: f64,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let params = estimate_params(spec, gap_m).map_err(|e| match e {
        Error::Domain { name, .. } => CliError::Invalid {
            field: match name {
                "n_atoms" => "--atoms",
                "atom_radius" => "--atom-radius",
                "atomic_weight" => "--atomic-weight",
                "gap" => "--gap",
                _ => name,
            }
            .to_string(),
            message: e.to_string(),
        },
        other => CliError::Model(other),
    })?;
    let mut json =
        serde_json::to_string_pretty(&ParamsConfig::from(&params)).expect("params serialize");
    json.push('\n');
    out.write_all(json.as_bytes()).map_err(stdout_err)
}
