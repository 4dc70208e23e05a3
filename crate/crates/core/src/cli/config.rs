//! JSON run configuration.
//!
//! Keys are SI-suffixed (`d_m`, `mass_kg`, ...). Unknown keys are rejected.
//! The `paper-defaults` preset uses the rounded 1e-8 m string length and
//! 2e-8 m pivot height rather than the unrounded 9e-9 m a 30-atom estimate
//! gives.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::analytic::linear_period;
use crate::cp_force::{AtomProperties, DEFAULT_BETA, DEFAULT_REGIME_MARGIN};
use crate::error::Error;
use crate::integrator::{IntegratorConfig, Method, DEFAULT_ABS_TOL, DEFAULT_MAX_STEPS, DEFAULT_REL_TOL};
use crate::pendulum::PendulumParams;

const PAPER_DEFAULTS: &str = include_str!("../../presets/paper-defaults.json");

/// Names accepted by `--preset`.
pub const PRESETS: &[&str] = &["paper-defaults"];

/// Fixed RK4 step used when `dt_s` is absent, as a fraction of the
/// small-angle period.
pub const DEFAULT_STEPS_PER_PERIOD: f64 = 2000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default = "default_margin")]
    pub regime_margin: f64,
    #[serde(default, skip_serializing_if = "OutputsConfig::is_empty")]
    pub outputs: OutputsConfig,
}

fn default_margin() -> f64 {
    DEFAULT_REGIME_MARGIN
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub d_m: f64,
    pub l_m: f64,
    pub mass_kg: f64,
    pub alpha0_m3: f64,
    pub omega0_rad_s: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_true")]
    pub include_gravity: bool,
}

fn default_beta() -> f64 {
    DEFAULT_BETA
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    /// Release angle; the string starts at rest.
    pub phi0_rad: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self { phi0_rad: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Rk4,
    Rk45,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub method: MethodName,
    /// RK4 step, s. Defaults to a 2000th of the small-angle period.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_s: Option<f64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Absolute end time, s. Takes precedence over `t_max_periods`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max_s: Option<f64>,
    /// End time in units of the small-angle period.
    pub t_max_periods: f64,
    pub max_steps: usize,
    pub record_stride: usize,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            method: MethodName::Rk45,
            dt_s: None,
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: DEFAULT_ABS_TOL,
            t_max_s: None,
            t_max_periods: 10.0,
            max_steps: DEFAULT_MAX_STEPS,
            record_stride: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_json: Option<PathBuf>,
}

impl OutputsConfig {
    fn is_empty(&self) -> bool {
        self.trajectory_csv.is_none() && self.report_json.is_none()
    }
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

fn config_key(name: &str) -> &'static str {
    match name {
        "d" => "params.d_m",
        "l" => "params.l_m",
        "M" => "params.mass_kg",
        "alpha0" => "params.alpha0_m3",
        "omega0" => "params.omega0_rad_s",
        "beta" => "params.beta",
        _ => "params",
    }
}

impl ParamsConfig {
    pub fn build(&self) -> Result<PendulumParams, CliError> {
        let map = |e: Error| match e {
            Error::Domain { name, .. } => invalid(config_key(name), e.to_string()),
            other => CliError::Model(other),
        };
        let atom = AtomProperties::new(self.alpha0_m3, self.omega0_rad_s).map_err(map)?;
        PendulumParams::new(
            self.d_m,
            self.l_m,
            self.mass_kg,
            atom,
            self.beta,
            self.include_gravity,
        )
        .map_err(map)
    }
}

impl From<&PendulumParams> for ParamsConfig {
    fn from(p: &PendulumParams) -> Self {
        Self {
            d_m: p.d(),
            l_m: p.l(),
            mass_kg: p.mass(),
            alpha0_m3: p.atom().alpha0(),
            omega0_rad_s: p.atom().omega0(),
            beta: p.beta(),
            include_gravity: p.include_gravity(),
        }
    }
}

impl IntegratorSection {
    /// Resolves period-relative settings against `params`.
    pub fn resolve(&self, params: &PendulumParams) -> Result<IntegratorConfig, CliError> {
        let period = linear_period(params);
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(invalid(field, format!("must be positive, got {v:e}")))
            }
        };
        let method = match self.method {
            MethodName::Rk4 => Method::Rk4Fixed {
                dt: match self.dt_s {
                    Some(dt) => positive("integrator.dt_s", dt)?,
                    None => period / DEFAULT_STEPS_PER_PERIOD,
                },
            },
            MethodName::Rk45 => Method::Rk45Adaptive {
                rel_tol: positive("integrator.rel_tol", self.rel_tol)?,
                abs_tol: positive("integrator.abs_tol", self.abs_tol)?,
            },
        };
        let t_max = match self.t_max_s {
            Some(t) => positive("integrator.t_max_s", t)?,
            None => positive("integrator.t_max_periods", self.t_max_periods)? * period,
        };
        if self.max_steps == 0 {
            return Err(invalid("integrator.max_steps", "must be at least 1"));
        }
        if self.record_stride == 0 {
            return Err(invalid("integrator.record_stride", "must be at least 1"));
        }
        Ok(IntegratorConfig {
            method,
            t_max,
            max_steps: self.max_steps,
            record_stride: self.record_stride,
        })
    }
}

impl RunConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        config.check()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn preset(name: &str) -> Result<Self, CliError> {
        match name {
            "paper-defaults" => Self::from_json(PAPER_DEFAULTS, "preset paper-defaults"),
            _ => Err(invalid(
                "--preset",
                format!("unknown preset `{name}`, expected one of {PRESETS:?}"),
            )),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Field-level checks that do not need the physics layer.
    pub fn check(&self) -> Result<(), CliError> {
        let phi0 = self.initial.phi0_rad;
        if phi0.is_nan() || phi0.abs() >= FRAC_PI_2 {
            return Err(invalid(
                "initial.phi0_rad",
                format!("release angle must satisfy |phi0| < pi/2, got {phi0:e}"),
            ));
        }
        if !(self.regime_margin >= 1.0 && self.regime_margin.is_finite()) {
            return Err(invalid(
                "regime_margin",
                format!("must be at least 1, got {:e}", self.regime_margin),
            ));
        }
        Ok(())
    }

    pub fn pendulum(&self) -> Result<PendulumParams, CliError> {
        self.params.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = r#"{"params": {"d_m": 2e-8, "l_m": 1e-8, "mass_kg": 1e-24,
        "alpha0_m3": 1e-30, "omega0_rad_s": 1e15}}"#;

    #[test]
    fn preset_matches_defaults() {
        let cfg = RunConfig::preset("paper-defaults").unwrap();
        assert_eq!(cfg.pendulum().unwrap(), PendulumParams::reference_design());
        assert_eq!(cfg.initial.phi0_rad, 1e-3);
        assert_eq!(cfg.integrator, IntegratorSection::default());
        assert!(RunConfig::preset("nope").is_err());
    }

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = RunConfig::from_json(MINIMAL, "inline").unwrap();
        assert_eq!(cfg.params.beta, 2.0);
        assert!(cfg.params.include_gravity);
        assert_eq!(cfg.regime_margin, 10.0);
        assert_eq!(cfg, RunConfig::preset("paper-defaults").unwrap());
    }

    #[test]
    fn partial_integrator_section() {
        let text = MINIMAL.replace("}}", r#"}, "integrator": {"method": "rk4", "dt_s": 1e-10}}"#);
        let cfg = RunConfig::from_json(&text, "inline").unwrap();
        assert_eq!(cfg.integrator.method, MethodName::Rk4);
        assert_eq!(cfg.integrator.dt_s, Some(1e-10));
        assert_eq!(cfg.integrator.t_max_periods, 10.0);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("\"l_m\"", "\"length\"");
        let err = RunConfig::from_json(&text, "inline").unwrap_err().to_string();
        assert!(err.contains("length"), "{err}");
        let text = r#"{"params": {"d_m": 2e-8, "l_m": 1e-8, "mass_kg": 1e-24,
            "alpha0_m3": 1e-30, "omega0_rad_s": 1e15, "gamma": 3}}"#;
        let err = RunConfig::from_json(text, "inline").unwrap_err().to_string();
        assert!(err.contains("gamma"), "{err}");
    }

    #[test]
    fn missing_key_is_named() {
        let text = MINIMAL.replace("\"mass_kg\": 1e-24,", "");
        let err = RunConfig::from_json(&text, "inline").unwrap_err().to_string();
        assert!(err.contains("mass_kg"), "{err}");
    }

    #[test]
    fn physics_errors_name_the_key() {
        let mut cfg = RunConfig::preset("paper-defaults").unwrap();
        cfg.params.d_m = 0.5e-8;
        assert!(cfg.pendulum().unwrap_err().to_string().contains("params.d_m"));
        cfg.params.d_m = 2e-8;
        cfg.params.beta = 3.0;
        assert!(cfg.pendulum().unwrap_err().to_string().contains("params.beta"));
        cfg.params.beta = 2.0;
        cfg.params.omega0_rad_s = 0.0;
        assert!(cfg
            .pendulum()
            .unwrap_err()
            .to_string()
            .contains("params.omega0_rad_s"));
    }

    #[test]
    fn field_checks() {
        let mut cfg = RunConfig::preset("paper-defaults").unwrap();
        cfg.initial.phi0_rad = 2.0;
        assert!(cfg.check().unwrap_err().to_string().contains("initial.phi0_rad"));
        cfg.initial.phi0_rad = 0.1;
        cfg.regime_margin = 0.5;
        assert!(cfg.check().unwrap_err().to_string().contains("regime_margin"));
    }

    #[test]
    fn integrator_resolution() {
        let cfg = RunConfig::preset("paper-defaults").unwrap();
        let p = cfg.pendulum().unwrap();
        let resolved = cfg.integrator.resolve(&p).unwrap();
        assert_eq!(resolved.t_max, 10.0 * linear_period(&p));
        let mut section = cfg.integrator;
        section.method = MethodName::Rk4;
        match section.resolve(&p).unwrap().method {
            Method::Rk4Fixed { dt } => assert_eq!(dt, linear_period(&p) / 2000.0),
            m => panic!("unexpected {m:?}"),
        }
        section.t_max_s = Some(1e-6);
        assert_eq!(section.resolve(&p).unwrap().t_max, 1e-6);
        section.dt_s = Some(-1.0);
        let err = section.resolve(&p).unwrap_err().to_string();
        assert!(err.contains("integrator.dt_s"), "{err}");
        section.dt_s = None;
        section.record_stride = 0;
        let err = section.resolve(&p).unwrap_err().to_string();
        assert!(err.contains("integrator.record_stride"), "{err}");
    }

    prop_compose! {
        fn arb_config()(
            d in 1.1e-8f64..1e-6,
            l in 1e-9f64..1e-8,
            m in 1e-26f64..1e-20,
            beta in 1.0f64..2.0,
            gravity in any::<bool>(),
            phi0 in -1.5f64..1.5,
            rk4 in any::<bool>(),
            dt in proptest::option::of(1e-12f64..1e-8),
            t_max in proptest::option::of(1e-9f64..1e-5),
            stride in 1usize..100,
            margin in 1.0f64..100.0,
            csv in proptest::option::of("[a-z]{1,8}\\.csv"),
        ) -> RunConfig {
            RunConfig {
                params: ParamsConfig {
                    d_m: d, l_m: l, mass_kg: m, alpha0_m3: 1e-30, omega0_rad_s: 1e15,
                    beta, include_gravity: gravity,
                },
                initial: InitialConfig { phi0_rad: phi0 },
                integrator: IntegratorSection {
                    method: if rk4 { MethodName::Rk4 } else { MethodName::Rk45 },
                    dt_s: dt,
                    t_max_s: t_max,
                    record_stride: stride,
                    ..IntegratorSection::default()
                },
                regime_margin: margin,
                outputs: OutputsConfig { trajectory_csv: csv.map(PathBuf::from), report_json: None },
            }
        }
    }

    proptest! {
        #[test]
        fn json_round_trip_is_lossless(cfg in arb_config()) {
            let back = RunConfig::from_json(&cfg.to_json(), "roundtrip").unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
