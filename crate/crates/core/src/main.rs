use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use casimir_pendulum::cli::{self, CliError, RunConfig, SweepParam, SweepSpec, EXIT_USAGE};
use casimir_pendulum::NanostringSpec;

/// Casimir atomic pendulum simulator.
#[derive(Parser, Debug)]
#[command(name = "casimir-pendulum", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bundled configuration, e.g. `paper-defaults`
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    fn load(&self) -> Result<RunConfig, CliError> {
        match (&self.config, &self.preset) {
            (Some(path), _) => RunConfig::load(path),
            (None, Some(name)) => RunConfig::preset(name),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the full dynamics; write the trajectory CSV and report JSON
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Trajectory CSV path
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report JSON path (stdout when absent)
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print the small-angle frequency and period
    Period {
        #[command(flatten)]
        source: Source,
        /// Also measure the period on the full dynamics
        #[arg(long)]
        simulate: bool,
    },
    /// Sweep one parameter and tabulate analytic and simulated periods
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        points: usize,
        /// Logarithmic spacing
        #[arg(long)]
        log: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the regime checks as JSON
    Validate {
        #[command(flatten)]
        source: Source,
    },
    /// Estimate pendulum parameters for an atomic chain
    Estimate {
        #[arg(long)]
        atoms: u32,
        /// Atom radius, m
        #[arg(long)]
        atom_radius: f64,
        /// Atomic weight, g/mol
        #[arg(long)]
        atomic_weight: f64,
        /// Tip-to-plate gap at rest, m
        #[arg(long)]
        gap: f64,
        /// Static polarizability, m^3
        #[arg(long)]
        alpha0: Option<f64>,
        /// Transition angular frequency, 1/s
        #[arg(long)]
        omega0: Option<f64>,
    },
}

fn run(command: Command) -> Result<u8, CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match command {
        Command::Simulate {
            source,
            out: csv,
            report,
        } => {
            let config = source.load()?;
            cli::exit_code(cli::cmd_simulate(
                &config,
                csv.as_deref(),
                report.as_deref(),
                &mut out,
            )?)
        }
        Command::Period { source, simulate } => {
            cli::exit_code(cli::cmd_period(&source.load()?, simulate, &mut out)?)
        }
        Command::Sweep {
            source,
            param,
            from,
            to,
            points,
            log,
            out: path,
        } => {
            let spec = SweepSpec {
                param,
                from,
                to,
                points,
                log,
            };
            cli::cmd_sweep(&source.load()?, &spec, &path)?;
            0
        }
        Command::Validate { source } => {
            cli::cmd_validate(&source.load()?, &mut out)?;
            0
        }
        Command::Estimate {
            atoms,
            atom_radius,
            atomic_weight,
            gap,
            alpha0,
            omega0,
        } => {
            let spec = NanostringSpec {
                n_atoms: atoms,
                atom_radius,
                atomic_weight,
                alpha0,
                omega0,
            };
            cli::cmd_estimate(&spec, gap, &mut out)?;
            0
        }
    };
    out.flush().ok();
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
