//! `hybridcool`: spectra, detuning solutions, trajectories and sweeps of the
//! hybrid atom-cavity cooling model as CSV.
//!
//! Exit status is 1 for invalid input and 2 for numerical failures.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod setup;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hybrid_cooling::presets::Figure;
use hybrid_cooling::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Model(Error::Validation(_) | Error::Config { .. }) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hybridcool", version, about = "Hybrid optomechanical cooling model")]
struct Cli {
    /// `key = value` parameter file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV path (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Figure preset.
    #[arg(long, global = true)]
    preset: Option<Figure>,
    /// Parameter override, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Fixed,
    Solve,
    Fraction,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Force noise spectrum on an ω grid.
    Spectrum {
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        omega_min: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        omega_max: f64,
        #[arg(long, default_value_t = 601)]
        points: usize,
    },
    /// All detuning solutions for the configured η.
    Solve,
    /// Heating and cooling coefficients at the working point.
    Coeffs,
    /// Mean phonon number against time.
    Evolve {
        /// End time; defaults to 10/W.
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Step of the rk4 method.
        #[arg(long)]
        dt: Option<f64>,
        /// Allow rk4 on the stiff fig5b preset.
        #[arg(long)]
        force: bool,
        /// Also export real and imaginary parts of every moment.
        #[arg(long)]
        moments: bool,
    },
    /// Steady state of the moment equations.
    Steady,
    /// Grid of steady-state phonon numbers.
    Sweep {
        /// `name:min:max:count[:log]`.
        #[arg(long)]
        axis1: Option<String>,
        #[arg(long)]
        axis2: Option<String>,
        #[arg(long, value_enum, default_value_t = Rule::Fixed)]
        rule: Rule,
        /// Also solve the moment equations per cell.
        #[arg(long)]
        numeric: bool,
    },
    /// Consistency of the linearization for a given drive.
    Feasibility {
        #[arg(long)]
        omega_p: f64,
        #[arg(long)]
        lambda0: f64,
        #[arg(long)]
        g0: f64,
        #[arg(long)]
        n_atoms: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta_c_prime: f64,
        #[arg(long, default_value_t = 0.1)]
        excitation: f64,
        #[arg(long, default_value_t = 10.0)]
        margin: f64,
    },
    /// Compare the moment engine with the truncated master equation.
    OracleCheck {
        /// Fock levels of a,b,E,R.
        #[arg(long, default_value = "4,6,4,3")]
        dims: String,
        #[arg(long, default_value_t = 0.02)]
        dt: f64,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 5)]
        stride: usize,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let start = matches!(cli.command, Command::OracleCheck { .. } if cli.preset.is_none())
        .then(hybrid_cooling::presets::oracle_params);
    let setup = setup::Setup::resolve(start, cli.preset, cli.config.as_deref(), &cli.set, |k| std::env::var(k).ok())?;
    let out = commands::dispatch(&cli.command, &setup)?;
    out.table.emit(cli.out.as_deref())?;
    out.failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
