//! Argument definitions and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use giantgyro_core::analysis::FigureId;

use crate::commands::{self, Baseline, Context, MethodChoice};
use crate::config::{parse_angle, Overrides, RunConfig, StructureName};
use crate::output::CsvSink;
use crate::validate::{self, CheckName, ValidateOptions};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "giantgyro",
    version,
    about = "Giant-cavity quantum gyroscope simulator"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

fn figure_id(text: &str) -> Result<FigureId, String> {
    FigureId::parse(text).ok_or_else(|| format!("unknown figure `{text}` (expected f3 to f12)"))
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file, or directory for multi-file commands. Defaults to stdout
    /// (or `figures/`).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed of the randomized validation sets.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub topology: Option<StructureName>,
    /// Points of mode `a`.
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Points of mode `b`.
    #[arg(long, global = true)]
    pub m: Option<u32>,
    /// Gap index of the nested layouts.
    #[arg(long, global = true)]
    pub nest_index: Option<u32>,
    /// Port rate of both cavity modes.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma_x: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma_y: Option<f64>,
    /// Cooperativity.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub co: Option<f64>,
    /// Rotation rate.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega_rot: Option<f64>,
    /// Neighbour phase in radians; accepts a `pi` suffix such as `0.5pi`.
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Points of the phase grid over `[0, 2 pi]`.
    #[arg(long, global = true)]
    pub phi_steps: Option<usize>,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            topology: self.topology,
            n: self.n,
            m: self.m,
            nest_index: self.nest_index,
            kappa: self.kappa,
            gamma_x: self.gamma_x,
            gamma_y: self.gamma_y,
            co: self.co,
            omega_rot: self.omega_rot,
            phi: self.phi,
            phi_steps: self.phi_steps,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nonreciprocal strength over the phase grid.
    Sigma,
    /// Port signal, noise and SNR over the phase grid.
    Snr {
        /// Write the panels of a figure instead.
        #[arg(long, value_parser = figure_id)]
        figure: Option<FigureId>,
    },
    /// Weak-rotation sensitivities over the phase grid.
    Sensitivity {
        /// Finite-difference sensitivities (the default).
        #[arg(long)]
        numeric: bool,
        /// Closed-form sensitivities.
        #[arg(long)]
        closed: bool,
    },
    /// Sensitivity ratios against a conventional coupling.
    Compare {
        #[arg(long, value_enum)]
        baseline: Baseline,
        /// Use finite-difference sensitivities instead of closed forms.
        #[arg(long)]
        numeric: bool,
    },
    /// Delay-differential trajectory under a constant drive.
    Dynamics {
        #[arg(long)]
        steps_per_tau: Option<u32>,
        #[arg(long)]
        total_time: Option<f64>,
        #[arg(long)]
        record_every: Option<u32>,
        /// Replace delayed couplings by instantaneous ones.
        #[arg(long)]
        markovian: bool,
    },
    /// Phases where the coupling is reciprocal.
    ReciprocalPoints {
        #[arg(long, value_enum, default_value = "both")]
        method: MethodChoice,
    },
    /// Figure data tables.
    Figures {
        /// Figures to write; all when omitted.
        #[arg(long, value_parser = figure_id)]
        figure: Vec<FigureId>,
    },
    /// Run the invariant battery.
    Validate {
        #[arg(long, value_enum, default_value = "all")]
        check: CheckName,
        /// Half-width of the frequency grid in units of `kappa_a`.
        #[arg(long, default_value_t = 5.0)]
        omega_span: f64,
        #[arg(long, default_value_t = 201)]
        omega_points: usize,
        /// Randomized parameter sets.
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Print the merged configuration as TOML.
    Config,
}

/// Loads the config file (if any) and applies the flags.
pub fn resolve(global: &GlobalArgs) -> Result<RunConfig, CliError> {
    let (mut config, counts_from_file) = match &global.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let table: toml::Table = text
                .parse()
                .map_err(|e| CliError::Usage(format!("config: {e}")))?;
            let config = RunConfig::from_toml(&text).map_err(CliError::Usage)?;
            (config, table.contains_key("structure"))
        }
        None => (RunConfig::default(), false),
    };
    config.merge(&global.overrides(), counts_from_file);
    Ok(config)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = resolve(&cli.global)?;
    let out = cli.global.out.clone();
    match cli.command {
        Command::Sigma => commands::sigma(&Context { config, out }),
        Command::Snr { figure } => commands::snr(&Context { config, out }, figure),
        Command::Sensitivity { numeric, closed } => {
            commands::sensitivity(&Context { config, out }, numeric, closed)
        }
        Command::Compare { baseline, numeric } => {
            commands::compare(&Context { config, out }, baseline, numeric)
        }
        Command::Dynamics {
            steps_per_tau,
            total_time,
            record_every,
            markovian,
        } => {
            let d = &mut config.dynamics;
            d.steps_per_tau = steps_per_tau.unwrap_or(d.steps_per_tau);
            d.total_time = total_time.unwrap_or(d.total_time);
            d.record_every = record_every.unwrap_or(d.record_every);
            d.markovian |= markovian;
            commands::dynamics(&Context { config, out })
        }
        Command::ReciprocalPoints { method } => {
            commands::reciprocal(&Context { config, out }, method)
        }
        Command::Figures { figure } => {
            let ids = if figure.is_empty() {
                FigureId::ALL.to_vec()
            } else {
                figure
            };
            commands::write_figures(&Context { config, out }, &ids)
        }
        Command::Validate {
            check,
            omega_span,
            omega_points,
            samples,
        } => {
            let options = ValidateOptions {
                check,
                omega_span,
                omega_points,
                samples,
            };
            let results = validate::run(&config, &options)?;
            for r in &results {
                println!("{}", r.line());
            }
            if let Some(path) = &out {
                let mut sink = CsvSink::create(
                    Some(path),
                    &config.snapshot(),
                    &["check", "x", "residual", "bound"],
                )?;
                validate::write_table(&mut sink, &results)?;
                sink.finish()?;
            }
            let failed: Vec<&str> = results
                .iter()
                .filter(|r| !r.passed())
                .map(|r| r.check.name())
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::CheckFailed(format!(
                    "failed checks: {}",
                    failed.join(", ")
                )))
            }
        }
        Command::Config => {
            print!("{}", config.to_toml());
            Ok(())
        }
    }
}
