//! Truncated q-series approximations of a density on a periodic window, the
//! classical Fourier partial sums they reduce to at `q = 1`, and overshoot
//! metrics at jumps.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::qcore::{DeformationParameter, QError};
use crate::quadrature::QuadratureConfig;
use crate::transform::{forward_raw, DensityFunction, TransformError};

/// Fewest scan points accepted by [`gibbs_overshoot`].
pub const MIN_SCAN_POINTS: usize = 51;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("window length must be positive and finite, got {0}")]
    InvalidWindow(f64),
    #[error("x = {x} lies outside the window [-{half}, {half}]")]
    OutsideWindow { x: f64, half: f64 },
    #[error("scan spacing {spacing:e} exceeds {limit:e}; use at least {MIN_SCAN_POINTS} points")]
    GridTooCoarse { spacing: f64, limit: f64 },
    #[error("{0}")]
    InvalidJump(String),
}

impl From<QError> for SeriesError {
    fn from(e: QError) -> Self {
        SeriesError::Transform(e.into())
    }
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// The interval `[-T/2, T/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicWindow {
    period: f64,
}

impl PeriodicWindow {
    pub fn new(period: f64) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(SeriesError::InvalidWindow(period));
        }
        Ok(Self { period })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn half_width(&self) -> f64 {
        self.period / 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        x.abs() <= self.half_width()
    }

    /// Wave number of the `n`-th harmonic, `2 pi n / T`.
    pub fn harmonic(&self, n: i64) -> f64 {
        2.0 * PI * n as f64 / self.period
    }

    /// `points` equally spaced abscissae covering the window.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        linspace(-self.half_width(), self.half_width(), points)
    }

    fn check(&self, x: f64) -> Result<()> {
        if !self.contains(x) {
            return Err(SeriesError::OutsideWindow {
                x,
                half: self.half_width(),
            });
        }
        Ok(())
    }

    fn confine(&self, f: &DensityFunction) -> Result<DensityFunction> {
        if f.dim() != 1 {
            return Err(TransformError::DimensionMismatch {
                expected: 1,
                got: f.dim(),
            }
            .into());
        }
        let h = self.half_width();
        Ok(f.restricted(&[-h], &[h])?)
    }
}

pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// `S_N^{(q)}[f](x) = [ (2-q)/T sum_{|n|<=N} hat f_q(k_n; k_n x) ]^{1/(2-q)}`
/// with `k_n = 2 pi n / T`.
///
/// Every term needs its own quadrature: the shift sits inside the deformed
/// kernel, so nothing can be cached across `x` unless `q = 1`.
#[derive(Debug, Clone)]
pub struct SeriesApproximation {
    p: DeformationParameter,
    n_terms: usize,
    window: PeriodicWindow,
    density: DensityFunction,
    cfg: QuadratureConfig,
    clamp_negative: bool,
}

impl SeriesApproximation {
    /// The density is confined to the window. Requires `1 <= q < 2`.
    pub fn new(
        p: DeformationParameter,
        n_terms: usize,
        window: PeriodicWindow,
        density: &DensityFunction,
        cfg: QuadratureConfig,
    ) -> Result<Self> {
        if !p.is_classical() {
            p.check_window(1)?;
        }
        cfg.validate().map_err(TransformError::from)?;
        Ok(Self {
            p,
            n_terms,
            window,
            density: window.confine(density)?,
            cfg,
            clamp_negative: true,
        })
    }

    /// With clamping off, a negative bracket is raised as the principal
    /// complex power and its real part is kept.
    pub fn with_clamp_negative(mut self, clamp: bool) -> Self {
        self.clamp_negative = clamp;
        self
    }

    pub fn q(&self) -> f64 {
        self.p.q()
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn window(&self) -> PeriodicWindow {
        self.window
    }

    pub fn density(&self) -> &DensityFunction {
        &self.density
    }

    fn term(&self, k: f64, x: f64) -> Result<Complex64> {
        let r = forward_raw(&self.density, self.p, &[k], k * x, &self.cfg)?;
        Ok(r.into_converged().map_err(TransformError::from)?.value)
    }

    /// `sum_{|n|<=N} hat f_q(k_n; k_n x)`, accumulated in conjugate pairs.
    /// Any term missing its quadrature tolerance is an error.
    pub fn bracket_sum(&self, x: f64) -> Result<Complex64> {
        self.window.check(x)?;
        let mut sum = self.term(0.0, x)?;
        for n in 1..=self.n_terms as i64 {
            let k = self.window.harmonic(n);
            sum += self.term(k, x)? + self.term(-k, x)?;
        }
        Ok(sum)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let q = self.p.q();
        let bracket = (2.0 - q) / self.window.period() * self.bracket_sum(x)?.re;
        if self.p.is_classical() {
            return Ok(bracket);
        }
        let power = 1.0 / (2.0 - q);
        Ok(if bracket >= 0.0 {
            bracket.powf(power)
        } else if self.clamp_negative {
            0.0
        } else {
            Complex64::new(bracket, 0.0).powf(power).re
        })
    }

    /// Evaluates at each abscissa in parallel, preserving order.
    pub fn eval_grid(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.par_iter().map(|&x| self.eval(x)).collect()
    }
}

/// Classical partial sums `(1/T) sum_{|n|<=N} e^{-i k_n x} hat f(k_n)` with
/// the coefficients computed once.
#[derive(Debug, Clone)]
pub struct ClassicalSeries {
    window: PeriodicWindow,
    /// `hat f(k_n)` for `n = 0..=N`; negative `n` are conjugates.
    coefficients: Vec<Complex64>,
}

impl ClassicalSeries {
    pub fn new(
        density: &DensityFunction,
        window: PeriodicWindow,
        n_terms: usize,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        let density = window.confine(density)?;
        let coefficients = (0..=n_terms as i64)
            .into_par_iter()
            .map(|n| {
                let k = window.harmonic(n);
                forward_raw(&density, DeformationParameter::classical(), &[k], 0.0, cfg)?
                    .into_converged()
                    .map(|r| r.value)
                    .map_err(TransformError::from)
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self {
            window,
            coefficients,
        })
    }

    /// Series from known coefficients `hat f(k_n)`, `n = 0..=N`.
    pub fn from_coefficients(window: PeriodicWindow, coefficients: Vec<Complex64>) -> Self {
        Self {
            window,
            coefficients,
        }
    }

    pub fn n_terms(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut sum = self.coefficients.first().map_or(0.0, |c| c.re);
        for (n, c) in self.coefficients.iter().enumerate().skip(1) {
            sum += 2.0 * (Complex64::cis(-self.window.harmonic(n as i64) * x) * c).re;
        }
        sum / self.window.period()
    }

    pub fn eval_grid(&self, xs: &[f64]) -> Vec<f64> {
        xs.par_iter().map(|&x| self.eval(x)).collect()
    }
}

pub fn classical_series_eval(
    density: &DensityFunction,
    period: f64,
    n_terms: usize,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let window = PeriodicWindow::new(period)?;
    window.check(x)?;
    Ok(ClassicalSeries::new(density, window, n_terms, cfg)?.eval(x))
}

/// Anything that can be sampled along the window, so overshoot metrics work
/// for both deformed and classical sums.
pub trait PartialSum: Sync {
    fn value_at(&self, x: f64) -> Result<f64>;
    fn q(&self) -> f64;
    fn n_terms(&self) -> usize;
    fn period(&self) -> f64;
}

impl PartialSum for SeriesApproximation {
    fn value_at(&self, x: f64) -> Result<f64> {
        self.eval(x)
    }
    fn q(&self) -> f64 {
        self.p.q()
    }
    fn n_terms(&self) -> usize {
        self.n_terms
    }
    fn period(&self) -> f64 {
        self.window.period()
    }
}

impl PartialSum for ClassicalSeries {
    fn value_at(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x))
    }
    fn q(&self) -> f64 {
        1.0
    }
    fn n_terms(&self) -> usize {
        ClassicalSeries::n_terms(self)
    }
    fn period(&self) -> f64 {
        self.window.period()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsReport {
    pub q: f64,
    pub n_terms: usize,
    pub jump_location: f64,
    pub jump_size: f64,
    /// `max (S_N - f_high) / jump_size` over the high side, floored at 0.
    pub overshoot_fraction: f64,
    pub half_width: f64,
    /// Where the scan maximum was found.
    pub peak_location: f64,
}

/// Overshoot of a partial sum just inside the high side of a jump of `f`.
///
/// `f_high` is the density value on the high side next to the jump. The scan
/// covers `w` (default `2T/N`) with `grid` uniform points.
pub fn gibbs_overshoot<S: PartialSum>(
    sum: &S,
    density: &DensityFunction,
    jump_location: f64,
    jump_size: f64,
    w: Option<f64>,
    grid: usize,
) -> Result<GibbsReport> {
    if !(jump_size > 0.0) {
        return Err(SeriesError::InvalidJump(format!(
            "jump size must be positive, got {jump_size}"
        )));
    }
    let w = w.unwrap_or(2.0 * sum.period() / sum.n_terms().max(1) as f64);
    if !(w > 0.0) {
        return Err(SeriesError::InvalidJump(format!("scan width {w}")));
    }
    let limit = w / 50.0;
    let spacing = if grid > 1 {
        w / (grid - 1) as f64
    } else {
        f64::INFINITY
    };
    if grid < MIN_SCAN_POINTS || spacing > limit {
        return Err(SeriesError::GridTooCoarse { spacing, limit });
    }
    let (left, right) = one_sided_values(density, jump_location).ok_or_else(|| {
        SeriesError::InvalidJump(format!("density is continuous at {jump_location}"))
    })?;
    let (lo, hi, f_high) = if left > right {
        (jump_location - w, jump_location, left)
    } else {
        (jump_location, jump_location + w, right)
    };
    let h = sum.period() / 2.0;
    let xs: Vec<f64> = linspace(lo, hi, grid)
        .into_iter()
        .map(|x| x.clamp(-h, h))
        .collect();
    let values = xs
        .par_iter()
        .map(|&x| sum.value_at(x))
        .collect::<Result<Vec<_>>>()?;
    let (peak_location, peak) =
        xs.iter()
            .zip(&values)
            .fold((xs[0], f64::NEG_INFINITY), |acc, (&x, &v)| {
                if v > acc.1 {
                    (x, v)
                } else {
                    acc
                }
            });
    Ok(GibbsReport {
        q: sum.q(),
        n_terms: sum.n_terms(),
        jump_location,
        jump_size,
        overshoot_fraction: ((peak - f_high) / jump_size).max(0.0),
        half_width: w,
        peak_location,
    })
}

/// Density values just left and right of `x`, or `None` where the density
/// is continuous there.
pub fn one_sided_values(density: &DensityFunction, x: f64) -> Option<(f64, f64)> {
    let eps = 1e-9 * (1.0 + x.abs());
    let left = density.value(&[x - eps]);
    let right = density.value(&[x + eps]);
    ((left - right).abs() > 1e-6 * left.abs().max(right.abs())).then_some((left, right))
}

/// Sample standard deviation (denominator `n - 1`).
pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
}
