//! `wgspec` — photon/phonon self-energies and spectral functions for a
//! one-dimensional optomechanical waveguide, from the command line.

mod commands;
mod config;
mod error;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{OracleScenario, RunContext, SweepAxis};
use config::ConfigDoc;
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "wgspec",
    version,
    about = "Photon and phonon spectra of a one-dimensional optomechanical waveguide",
    long_about = "Evaluates interaction-induced frequency shifts, effective damping rates \
and spectral functions for photons and phonons coupled by Brillouin scattering in a \
nanoscale waveguide, and cross-checks them against a time-domain integration."
)]
struct Cli {
    /// Configuration document (JSON). Built-in silicon nanowire defaults
    /// are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default: config `output.dir`, else `wgspec-out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the number of frequency-grid points for all curves.
    #[arg(long, global = true)]
    grid_points: Option<usize>,

    /// Override the frequency-grid half width \[Hz\] for all curves.
    #[arg(long, global = true)]
    grid_halfwidth_hz: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Thermal-phonon response of the unpumped waveguide at a probe mode.
    Empty {
        /// Probe photon wavenumber, dimensionless k·a.
        #[arg(long)]
        ka: Option<f64>,
    },
    /// One pumped photon mode: EM self-energy at the pump and phonon lines.
    SingleField {
        /// Pump wavenumber, dimensionless k·a.
        #[arg(long)]
        k0_a: Option<f64>,
        /// Mean photon number in the pumped mode.
        #[arg(long)]
        n0: Option<f64>,
        /// Pump power \[W\]; converted to a photon number via flux × transit
        /// time. Mutually exclusive with --n0.
        #[arg(long)]
        power_w: Option<f64>,
        /// Phonon mode index for the phonon-line outputs (default: the
        /// quasi-resonant index per branch).
        #[arg(long)]
        q_index: Option<i64>,
    },
    /// Two pumped photon modes: phonon cooling/heating at q0 = k1 − k2.
    TwoField {
        #[arg(long)]
        k1_a: Option<f64>,
        #[arg(long)]
        n1: Option<f64>,
        #[arg(long)]
        k2_a: Option<f64>,
        #[arg(long)]
        n2: Option<f64>,
    },
    /// Validate the closed-form spectra against the time-domain route.
    OracleCheck {
        #[arg(long, value_enum, default_value_t = OracleScenario::Empty)]
        scenario: OracleScenario,
        /// Mode-window half size (2·n_max+1 modes, at most 64 total).
        #[arg(long, default_value_t = 8)]
        n_max: i64,
        /// Scale factor on the integration step; > 1 coarsens.
        #[arg(long, default_value_t = 1.0)]
        dt_scale: f64,
        /// Probe k·a for the empty scenario.
        #[arg(long)]
        ka: Option<f64>,
    },
    /// Re-run the configured scenario over a list of parameter values.
    Sweep {
        /// One of: T, N0, N1, N2, k_a, f_hz, Gamma_hz, gamma_hz.
        #[arg(long, value_enum)]
        axis: SweepAxis,
        /// Comma-separated values of the swept parameter.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
}

fn load_config(cli: &Cli) -> CliResult<ConfigDoc> {
    match &cli.config {
        Some(path) => ConfigDoc::load(path),
        None => Ok(ConfigDoc::default_silicon()),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let config = load_config(&cli)?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| {
            config
                .output
                .as_ref()
                .and_then(|o| o.dir.as_ref())
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| PathBuf::from("wgspec-out"));
    let ctx = RunContext {
        config,
        out_dir,
        grid_halfwidth_hz: cli.grid_halfwidth_hz,
        grid_points: cli.grid_points,
    };

    match cli.command {
        Command::Empty { ka } => {
            let ka = ka
                .or(match &ctx.config.scenario {
                    Some(config::ScenarioSection::Empty { k_a }) => Some(*k_a),
                    _ => None,
                })
                .unwrap_or(2.0);
            commands::run_empty(&ctx, ka)?;
        }
        Command::SingleField {
            k0_a,
            n0,
            power_w,
            q_index,
        } => {
            let k0_a = k0_a
                .or(match &ctx.config.scenario {
                    Some(config::ScenarioSection::SingleField { k0_a, .. }) => Some(*k0_a),
                    _ => None,
                })
                .ok_or_else(|| {
                    CliError::Validation(
                        "single-field needs --k0-a or a single_field scenario in the config"
                            .into(),
                    )
                })?;
            commands::run_single_field(&ctx, k0_a, n0, power_w, q_index)?;
        }
        Command::TwoField { k1_a, n1, k2_a, n2 } => {
            let from_cfg = match &ctx.config.scenario {
                Some(config::ScenarioSection::TwoFields { k1_a, n1, k2_a, n2 }) => {
                    Some((*k1_a, *n1, *k2_a, *n2))
                }
                _ => None,
            };
            let (k1_a, n1, k2_a, n2) = match (k1_a, n1, k2_a, n2, from_cfg) {
                (Some(a), Some(b), Some(c), Some(d), _) => (a, b, c, d),
                (None, None, None, None, Some(cfg)) => cfg,
                (a, b, c, d, Some(cfg)) => (
                    a.unwrap_or(cfg.0),
                    b.unwrap_or(cfg.1),
                    c.unwrap_or(cfg.2),
                    d.unwrap_or(cfg.3),
                ),
                _ => {
                    return Err(CliError::Validation(
                        "two-field needs --k1-a/--n1/--k2-a/--n2 or a two_fields scenario"
                            .into(),
                    ))
                }
            };
            commands::run_two_field(&ctx, k1_a, n1, k2_a, n2)?;
        }
        Command::OracleCheck {
            scenario,
            n_max,
            dt_scale,
            ka,
        } => {
            commands::run_oracle_check(&ctx, scenario, n_max, dt_scale, ka)?;
        }
        Command::Sweep { axis, values } => {
            commands::run_sweep(&ctx, axis, &values)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version through the same error path
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
