//! `qfourier`: data for the q-exponential, q-delta, q-Fourier roundtrip and
//! q-series experiments, written as CSV or JSON.
//!
//! Exit status: 0 success, 1 I/O failure, 2 invalid input, 3 numerical
//! non-convergence (no output is written).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;
mod settings;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use qfourier::qcore::QError;
use qfourier::quadrature::QuadError;
use qfourier::series::SeriesError;
use qfourier::transform::TransformError;
use thiserror::Error;

use settings::{Defaults, DensityKind, Options, Settings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl From<QError> for CliError {
    fn from(e: QError) -> Self {
        match e {
            QError::Convergence { .. } => CliError::NonConvergence(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::NonConvergence { .. }
            | QuadError::TailEstimateUnreliable { .. }
            | QuadError::IntegrandError { .. } => CliError::NonConvergence(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Quadrature(q) => q.into(),
            TransformError::Core(q) => q.into(),
            TransformError::NegativeBase { .. } => CliError::NonConvergence(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::Transform(t) => t.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(version, about = "q-Fourier transform experiments", long_about = None)]
struct Cli {
    #[command(flatten)]
    options: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Modulus and argument of e_q^z on a square grid or at one point
    Qexp {
        /// Single point `re,im`
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        z: Option<Vec<f64>>,
        /// Grid half-width
        #[arg(long, default_value_t = 4.0)]
        extent: f64,
    },
    /// Sifting check of the q-delta against a Gaussian test function
    DeltaCheck,
    /// Invert the q-Fourier transform at points and compare with the density
    Roundtrip {
        /// `x1,x2;y1,y2;...` (or `a,b,c` when d = 1)
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
    },
    /// Truncated q-series S_N over the window
    Series,
    /// Overshoot at a jump of the density and interior spread
    Gibbs {
        /// Jump location (default T/4)
        #[arg(long, allow_hyphen_values = true)]
        jump: Option<f64>,
        /// Scan width on the high side (default 2T/N)
        #[arg(long)]
        width: Option<f64>,
    },
}

fn defaults(command: &Command) -> Defaults {
    let base = Defaults {
        q: &[1.1],
        d: 1,
        n_terms: 50,
        period: 4.0,
        density: DensityKind::Gaussian,
        grid: 401,
    };
    match command {
        Command::Qexp { .. } => Defaults {
            q: &[1.4],
            grid: 81,
            ..base
        },
        Command::DeltaCheck | Command::Roundtrip { .. } => base,
        Command::Series => Defaults {
            q: &[1.0, 1.1],
            ..base
        },
        Command::Gibbs { .. } => Defaults {
            q: &[1.0, 1.1],
            density: DensityKind::Uniform,
            grid: 101,
            ..base
        },
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let settings = Settings::resolve(&cli.options, &defaults(&cli.command))?;
    let table = match &cli.command {
        Command::Qexp { z, extent } => {
            let z = match z.as_deref() {
                None => None,
                Some([re, im]) => Some(Complex64::new(*re, *im)),
                Some(v) => {
                    return Err(CliError::Usage(format!(
                        "--z takes `re,im`, got {} numbers",
                        v.len()
                    )))
                }
            };
            if !(*extent > 0.0) {
                return Err(CliError::Usage(format!("extent {extent} must be positive")));
            }
            commands::qexp(&settings, z, *extent)?
        }
        Command::DeltaCheck => commands::delta_check(&settings)?,
        Command::Roundtrip { points } => commands::roundtrip(&settings, points.as_deref())?,
        Command::Series => commands::series(&settings)?,
        Command::Gibbs { jump, width } => commands::gibbs(&settings, *jump, *width)?,
    };
    match &settings.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(settings.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write(settings.format, &mut lock)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qfourier: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
