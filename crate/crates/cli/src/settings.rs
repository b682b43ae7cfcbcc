//! Command-line flags, the optional flat TOML config file, and their merge.
//! Flags always win over the file; the file wins over command defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use qfourier::quadrature::QuadratureConfig;
use serde::Deserialize;

use crate::output::Format;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityKind {
    Gaussian,
    Uniform,
    /// Piecewise-linear density read from `--samples`.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Deformation parameter; a comma-separated list for series and gibbs
    #[arg(long, global = true, value_delimiter = ',')]
    pub q: Vec<f64>,
    /// Dimension (1 to 3)
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Truncation order N of the series
    #[arg(long, global = true)]
    pub n_terms: Option<usize>,
    /// Window length T
    #[arg(long, global = true)]
    pub period: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub density: Option<DensityKind>,
    /// CSV file with `x,value` columns for `--density sampled`
    #[arg(long, global = true)]
    pub samples: Option<PathBuf>,
    /// Number of grid points (per axis for qexp)
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Truncation of infinite integration axes
    #[arg(long, global = true)]
    pub kmax: Option<f64>,
    /// Interval budget of each adaptive integral
    #[arg(long, global = true)]
    pub max_subdivisions: Option<usize>,
    /// Clamp negative series brackets to zero
    #[arg(long, global = true, value_enum)]
    pub clamp_negative: Option<Switch>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat TOML file with the same keys as the flags (underscored)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum QValue {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    q: Option<QValue>,
    d: Option<usize>,
    n_terms: Option<usize>,
    period: Option<f64>,
    density: Option<DensityKind>,
    samples: Option<PathBuf>,
    grid: Option<usize>,
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
    kmax: Option<f64>,
    max_subdivisions: Option<usize>,
    clamp_negative: Option<Switch>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {}", path.display(), e.message())))
    }
}

/// Per-command fallbacks for anything neither flag nor file sets.
pub struct Defaults {
    pub q: &'static [f64],
    pub d: usize,
    pub n_terms: usize,
    pub period: f64,
    pub density: DensityKind,
    pub grid: usize,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub q: Vec<f64>,
    pub d: usize,
    pub n_terms: usize,
    pub period: f64,
    pub density: DensityKind,
    pub samples: Option<PathBuf>,
    pub grid: usize,
    pub quadrature: QuadratureConfig,
    pub clamp_negative: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Settings {
    pub fn resolve(opts: &Options, defaults: &Defaults) -> Result<Self, CliError> {
        let file = match &opts.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let q = if !opts.q.is_empty() {
            opts.q.clone()
        } else {
            match file.q {
                Some(QValue::One(q)) => vec![q],
                Some(QValue::Many(qs)) => qs,
                None => defaults.q.to_vec(),
            }
        };
        let base = QuadratureConfig::default();
        let quadrature = QuadratureConfig::default()
            .with_tolerances(
                opts.abs_tol.or(file.abs_tol).unwrap_or(base.abs_tol),
                opts.rel_tol.or(file.rel_tol).unwrap_or(base.rel_tol),
            )
            .with_k_max(opts.kmax.or(file.kmax).unwrap_or(base.k_max))
            .with_max_subdivisions(
                opts.max_subdivisions
                    .or(file.max_subdivisions)
                    .unwrap_or(base.max_subdivisions),
            );
        quadrature
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let settings = Self {
            q,
            d: opts.d.or(file.d).unwrap_or(defaults.d),
            n_terms: opts.n_terms.or(file.n_terms).unwrap_or(defaults.n_terms),
            period: opts.period.or(file.period).unwrap_or(defaults.period),
            density: opts.density.or(file.density).unwrap_or(defaults.density),
            samples: opts.samples.clone().or(file.samples),
            grid: opts.grid.or(file.grid).unwrap_or(defaults.grid),
            quadrature,
            clamp_negative: opts
                .clamp_negative
                .or(file.clamp_negative)
                .unwrap_or(Switch::On)
                == Switch::On,
            format: opts.format.or(file.format).unwrap_or(Format::Csv),
            out: opts.out.clone().or(file.out),
        };
        if settings.q.is_empty() {
            return Err(CliError::Usage("no q value given".into()));
        }
        if settings.q.iter().any(|q| !q.is_finite()) {
            return Err(CliError::Usage("q must be finite".into()));
        }
        if !(settings.period > 0.0) || !settings.period.is_finite() {
            return Err(CliError::Usage(format!(
                "period {} must be positive",
                settings.period
            )));
        }
        if settings.grid == 0 {
            return Err(CliError::Usage("grid needs at least one point".into()));
        }
        Ok(settings)
    }

    /// The single q of commands that take exactly one.
    pub fn single_q(&self) -> Result<f64, CliError> {
        match self.q.as_slice() {
            [q] => Ok(*q),
            qs => Err(CliError::Usage(format!(
                "this command takes one q value, got {}",
                qs.len()
            ))),
        }
    }
}
