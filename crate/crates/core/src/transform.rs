//! The d-dimensional q-Fourier transform of a nonnegative density, its
//! inversion through the q-deformed delta, the numerical sifting check of
//! that delta, and the gamma-mixture identity for the q-exponential.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::qcore::{self, c_constant, q_exp, q_plane_wave, DeformationParameter, QError};
use crate::quadrature::{
    integrate_box, integrate_box_composed, integrate_halfline_gamma, Axis, BoxDomain, QuadError,
    QuadratureConfig, QuadratureResult,
};

/// Interior margin for inversion points, as a fraction of the support width.
pub const DEFAULT_INTERIOR_MARGIN: f64 = 0.01;

/// Largest supported dimension.
pub const MAX_DIMENSION: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Validity(QError),
    #[error(transparent)]
    Core(QError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("expected a {expected}-dimensional argument, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {0} is not in 1..=3")]
    UnsupportedDimension(usize),
    #[error("point {x:?} is not interior to the support")]
    NotInterior { x: Vec<f64> },
    #[error("k-integral {integral:e} is negative beyond its error bar {error:e}")]
    NegativeBase { integral: f64, error: f64 },
    #[error("invalid density: {0}")]
    InvalidDensity(String),
}

impl From<QError> for TransformError {
    fn from(e: QError) -> Self {
        match e {
            QError::Validity { .. } => TransformError::Validity(e),
            other => TransformError::Core(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, TransformError>;

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type Factor = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Where a density lives, which fixes how its integrals are domained.
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    /// Zero outside the box `[lower_i, upper_i]`.
    Compact { lower: Vec<f64>, upper: Vec<f64> },
    /// Decays like `exp(-|x|^2 / scale^2)` around the origin.
    GaussianLike { scale: f64 },
    /// Decays like `|x|^{-alpha}`.
    Algebraic { alpha: f64 },
}

/// A nonnegative integrable function on `R^d`, `d <= 3`.
///
/// Product densities can also carry their one-dimensional factors, which
/// lets the delta sifting check factorize.
#[derive(Clone)]
pub struct DensityFunction {
    name: String,
    dim: usize,
    eval: Evaluator,
    support: Support,
    factors: Option<Vec<Factor>>,
}

impl fmt::Debug for DensityFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityFunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("support", &self.support)
            .field("separable", &self.factors.is_some())
            .finish()
    }
}

impl DensityFunction {
    pub fn from_fn(
        name: impl Into<String>,
        dim: usize,
        support: Support,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 || dim > MAX_DIMENSION {
            return Err(TransformError::UnsupportedDimension(dim));
        }
        match &support {
            Support::Compact { lower, upper } => {
                if lower.len() != dim || upper.len() != dim {
                    return Err(TransformError::InvalidDensity(
                        "support box dimension does not match".into(),
                    ));
                }
                if lower
                    .iter()
                    .zip(upper)
                    .any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite())
                {
                    return Err(TransformError::InvalidDensity(format!(
                        "empty or unbounded support box {lower:?}..{upper:?}"
                    )));
                }
            }
            Support::GaussianLike { scale } if !(*scale > 0.0) => {
                return Err(TransformError::InvalidDensity(format!("bad scale {scale}")))
            }
            Support::Algebraic { alpha } if !(*alpha > 1.0) => {
                return Err(TransformError::InvalidDensity(format!(
                    "decay exponent {alpha} is not integrable"
                )))
            }
            _ => {}
        }
        Ok(Self {
            name: name.into(),
            dim,
            eval: Arc::new(eval),
            support,
            factors: None,
        })
    }

    /// `exp(-|x|^2) / pi^{d/2}`.
    pub fn gaussian(dim: usize) -> Result<Self> {
        let norm = PI.powf(-(dim as f64) / 2.0);
        let mut density = Self::from_fn(
            "gaussian",
            dim,
            Support::GaussianLike { scale: 1.0 },
            move |x| norm * (-x.iter().map(|v| v * v).sum::<f64>()).exp(),
        )?;
        let factor: Factor = Arc::new(|x: f64| (-x * x).exp() / PI.sqrt());
        density.factors = Some(vec![factor; dim]);
        Ok(density)
    }

    /// Constant `level` on the cube `[-half_width, half_width]^d`.
    pub fn constant_box(dim: usize, half_width: f64, level: f64) -> Result<Self> {
        if !(level >= 0.0) || !(half_width > 0.0) {
            return Err(TransformError::InvalidDensity(format!(
                "box level {level} / half width {half_width}"
            )));
        }
        let mut density = Self::from_fn(
            "box",
            dim,
            Support::Compact {
                lower: vec![-half_width; dim],
                upper: vec![half_width; dim],
            },
            move |_| level,
        )?;
        let per_axis = level.powf(1.0 / dim as f64);
        let factor: Factor =
            Arc::new(move |x: f64| if x.abs() <= half_width { per_axis } else { 0.0 });
        density.factors = Some(vec![factor; dim]);
        Ok(density)
    }

    /// Normalized uniform density on `[-half_width, half_width]^d`.
    pub fn uniform(dim: usize, half_width: f64) -> Result<Self> {
        let level = (2.0 * half_width).powi(-(dim as i32));
        let mut density = Self::constant_box(dim, half_width, level)?;
        density.name = "uniform".into();
        Ok(density)
    }

    /// The uniform density `2/T` on `[-T/4, T/4]` used with period `T`.
    pub fn uniform_window(period: f64) -> Result<Self> {
        Self::uniform(1, period / 4.0)
    }

    /// Piecewise-linear density through `(xs[i], values[i])`, zero outside
    /// `[xs[0], xs[n-1]]`.
    pub fn sampled(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != values.len() {
            return Err(TransformError::InvalidDensity(
                "need at least two samples with matching values".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(TransformError::InvalidDensity(
                "sample abscissae must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(TransformError::InvalidDensity(
                "sample values must be finite and nonnegative".into(),
            ));
        }
        let support = Support::Compact {
            lower: vec![xs[0]],
            upper: vec![xs[xs.len() - 1]],
        };
        Self::from_fn("sampled", 1, support, move |x| {
            let t = x[0];
            let i = xs.partition_point(|&v| v <= t).clamp(1, xs.len() - 1);
            let (x0, x1) = (xs[i - 1], xs[i]);
            let w = ((t - x0) / (x1 - x0)).clamp(0.0, 1.0);
            values[i - 1] * (1.0 - w) + values[i] * w
        })
    }

    /// The same density set to zero outside the box `[lower_i, upper_i]`.
    pub fn restricted(&self, lower: &[f64], upper: &[f64]) -> Result<Self> {
        self.check_dim(lower)?;
        self.check_dim(upper)?;
        let (lower, upper): (Vec<f64>, Vec<f64>) = match &self.support {
            Support::Compact {
                lower: l0,
                upper: u0,
            } => (
                lower.iter().zip(l0).map(|(a, b)| a.max(*b)).collect(),
                upper.iter().zip(u0).map(|(a, b)| a.min(*b)).collect(),
            ),
            _ => (lower.to_vec(), upper.to_vec()),
        };
        let inner = self.clone();
        Self::from_fn(
            self.name.clone(),
            self.dim,
            Support::Compact { lower, upper },
            move |x| inner.value(x),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn is_separable(&self) -> bool {
        self.factors.is_some()
    }

    /// Density value; exactly zero outside a compact support.
    pub fn value(&self, x: &[f64]) -> f64 {
        if let Support::Compact { lower, upper } = &self.support {
            let inside = x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (l, u))| *v >= *l && *v <= *u);
            if !inside {
                return 0.0;
            }
        }
        (self.eval)(x)
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(TransformError::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Integration axes covering the support, and the tail exponent for
    /// infinite ones.
    fn axes(&self, cfg: &QuadratureConfig) -> (Vec<Axis>, Option<f64>) {
        match &self.support {
            Support::Compact { lower, upper } => (
                lower
                    .iter()
                    .zip(upper)
                    .map(|(&lo, &hi)| Axis::Finite { lo, hi })
                    .collect(),
                None,
            ),
            Support::GaussianLike { scale } => {
                let reach = scale
                    * (10.0 * self.dim as f64 / cfg.abs_tol.max(1e-300))
                        .ln()
                        .sqrt();
                (
                    vec![
                        Axis::Finite {
                            lo: -reach,
                            hi: reach
                        };
                        self.dim
                    ],
                    None,
                )
            }
            Support::Algebraic { alpha } => (vec![Axis::RealLine; self.dim], Some(*alpha)),
        }
    }

    fn domain(&self, cfg: &QuadratureConfig) -> Result<(BoxDomain, QuadratureConfig)> {
        let (axes, tail) = self.axes(cfg);
        let dom = BoxDomain::new(axes)?;
        Ok((dom, cfg.clone().with_tail_decay(tail)))
    }

    fn is_interior(&self, x: &[f64], margin: f64) -> bool {
        match &self.support {
            Support::Compact { lower, upper } => {
                x.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| {
                    let pad = margin * (u - l);
                    *v > l + pad && *v < u - pad
                })
            }
            _ => true,
        }
    }
}

/// One value of the transform at wave vector `k` and shift `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformSample {
    pub k: Vec<f64>,
    pub x: Vec<f64>,
    pub value: Complex64,
    pub error_estimate: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// `int f(y) e_q^{i (k.y - kx) f(y)^{q-1}} d^d y` with no window check, so
/// that `q = 1` and the whole one-dimensional range `[1, 2)` are usable.
pub(crate) fn forward_raw(
    f: &DensityFunction,
    p: DeformationParameter,
    k: &[f64],
    kx: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<Complex64>> {
    let (dom, cfg) = f.domain(cfg)?;
    let deform = p.q() - 1.0;
    let r = integrate_box(
        |y: &[f64]| {
            let fy = f.value(y);
            if fy <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let stretch = if deform == 0.0 {
                1.0
            } else {
                (deform * fy.ln()).exp()
            };
            q_plane_wave(p, (dot(k, y) - kx) * stretch) * fy
        },
        &dom,
        &cfg,
    )?;
    Ok(r)
}

/// The d-dimensional q-Fourier transform `hat f_q(k; k.x)`.
///
/// Requires `1 < q < 1 + 1/d`. The shift `x` enters only through `k.x`.
pub fn q_fourier_forward(
    f: &DensityFunction,
    p: DeformationParameter,
    k: &[f64],
    x: &[f64],
    cfg: &QuadratureConfig,
) -> Result<TransformSample> {
    p.check_window(f.dim())?;
    f.check_dim(k)?;
    f.check_dim(x)?;
    let r = forward_raw(f, p, k, dot(k, x), cfg)?;
    Ok(TransformSample {
        k: k.to_vec(),
        x: x.to_vec(),
        value: r.value,
        error_estimate: r.error_estimate,
        converged: r.converged,
    })
}

/// A density value recovered by inverting the transform.
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub x: Vec<f64>,
    pub value: f64,
    /// `int hat f_q(k; k.x) d^d k`
    pub k_integral: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

/// `[ (1/c(q,d)) int hat f_q(k; k.x) d^d k ]^{1/(1 - d(q-1))}` with the
/// default interior margin.
pub fn q_fourier_invert_at(
    f: &DensityFunction,
    p: DeformationParameter,
    x: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Inversion> {
    q_fourier_invert_at_with_margin(f, p, x, cfg, DEFAULT_INTERIOR_MARGIN)
}

/// Inversion at `x`, which must lie at least `margin` times the support
/// width inside a compact support.
///
/// Conjugate symmetry `hat f(-k) = conj hat f(k)` halves the k-domain: the
/// first wave-vector axis runs over `[0, inf)` and the real part is doubled.
/// Infinite k-axes are truncated at `k_max` with tails extrapolated assuming
/// decay exponent `1/(q-1) - (d-1)` per axis.
pub fn q_fourier_invert_at_with_margin(
    f: &DensityFunction,
    p: DeformationParameter,
    x: &[f64],
    cfg: &QuadratureConfig,
    margin: f64,
) -> Result<Inversion> {
    let d = f.dim();
    p.check_window(d)?;
    f.check_dim(x)?;
    if !f.is_interior(x, margin) {
        return Err(TransformError::NotInterior { x: x.to_vec() });
    }
    let mut axes = vec![Axis::HalfLine { lo: 0.0 }];
    axes.extend(std::iter::repeat_n(Axis::RealLine, d - 1));
    let k_dom = BoxDomain::new(axes)?;
    let alpha = p.pole() - (d as f64 - 1.0);
    let k_cfg = cfg.clone().with_tail_decay(Some(alpha));
    let inner_cfg = cfg.clone().with_tail_decay(None);
    let half = integrate_box_composed(
        |k: &[f64]| {
            forward_raw(f, p, k, dot(k, x), &inner_cfg)
                .map(|r| QuadratureResult {
                    value: r.value.re,
                    error_estimate: r.error_estimate,
                    evaluations: r.evaluations,
                    converged: r.converged,
                })
                .map_err(|e| match e {
                    TransformError::Quadrature(q) => q,
                    other => QuadError::InvalidConfig(other.to_string()),
                })
        },
        &k_dom,
        &k_cfg,
    )?;
    let k_integral = 2.0 * half.value;
    let k_error = 2.0 * half.error_estimate;
    let c = c_constant(p, d)?;
    let exponent = 1.0 / (1.0 - d as f64 * (p.q() - 1.0));
    if k_integral < 0.0 && -k_integral > k_error {
        return Err(TransformError::NegativeBase {
            integral: k_integral,
            error: k_error,
        });
    }
    let base = (k_integral / c).max(0.0);
    let value = base.powf(exponent);
    let error_estimate = if k_integral > 0.0 {
        value * exponent * k_error / k_integral
    } else {
        (k_error / c).powf(exponent)
    };
    Ok(Inversion {
        x: x.to_vec(),
        value,
        k_integral,
        error_estimate,
        converged: half.converged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripPoint {
    pub x: Vec<f64>,
    pub recovered: f64,
    pub reference: f64,
    pub relative_error: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripReport {
    pub points: Vec<RoundtripPoint>,
    pub max_relative_error: f64,
    pub mean_relative_error: f64,
}

/// Inverts the transform at each point and compares with the density.
/// Points are evaluated in parallel; the report keeps the input order.
pub fn roundtrip_report(
    f: &DensityFunction,
    p: DeformationParameter,
    points: &[Vec<f64>],
    cfg: &QuadratureConfig,
) -> Result<RoundtripReport> {
    let rows = points
        .par_iter()
        .map(|x| {
            let inv = q_fourier_invert_at(f, p, x, cfg)?;
            let reference = f.value(x);
            Ok(RoundtripPoint {
                x: x.clone(),
                recovered: inv.value,
                reference,
                relative_error: (inv.value - reference).abs() / reference.abs(),
                converged: inv.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len().max(1) as f64;
    Ok(RoundtripReport {
        max_relative_error: rows.iter().map(|r| r.relative_error).fold(0.0, f64::max),
        mean_relative_error: rows.iter().map(|r| r.relative_error).sum::<f64>() / n,
        points: rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTestReport {
    pub q: f64,
    pub d: usize,
    pub test_function: String,
    pub sift_value: f64,
    pub reference: f64,
    pub relative_error: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

/// `int_{R^m} hat phi(u) d^m u` for the classical transform
/// `hat phi(u) = int phi(x) e^{i u.x} d^m x`, with `phi` given on `axes`.
/// Uses `hat phi(-u) = conj hat phi(u)` for real `phi`.
fn integrated_fourier_transform(
    phi: &(dyn Fn(&[f64]) -> f64 + Sync),
    axes: Vec<Axis>,
    tail: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<f64>> {
    let m = axes.len();
    let x_dom = BoxDomain::new(axes)?;
    let x_cfg = cfg.clone().with_tail_decay(tail);
    let mut u_axes = vec![Axis::HalfLine { lo: 0.0 }];
    u_axes.extend(std::iter::repeat_n(Axis::RealLine, m - 1));
    let u_dom = BoxDomain::new(u_axes)?;
    let u_cfg = cfg.clone().with_tail_decay(None);
    let half = integrate_box_composed(
        |u: &[f64]| {
            integrate_box(
                |x: &[f64]| Complex64::cis(dot(u, x)) * phi(x),
                &x_dom,
                &x_cfg,
            )
            .map(|r| QuadratureResult {
                value: r.value.re,
                error_estimate: r.error_estimate,
                evaluations: r.evaluations,
                converged: r.converged,
            })
        },
        &u_dom,
        &u_cfg,
    )?;
    Ok(QuadratureResult {
        value: 2.0 * half.value,
        error_estimate: 2.0 * half.error_estimate,
        ..half
    })
}

/// Numerical sifting check `int phi(x) delta_q^{(d)}(x) d^d x = phi(0)`.
///
/// Evaluated in the order classical transform of `phi`, then the gamma
/// mixture: the integral `int hat phi(t k) d^d k = t^{-d} int hat phi(u) d^d u`
/// is computed once, and the mixture `int gamma(z_q; t) t^{-d} dt` separately.
/// Product test functions factorize the first integral by axis.
pub fn delta_sift(
    phi: &DensityFunction,
    p: DeformationParameter,
    cfg: &QuadratureConfig,
) -> Result<DeltaTestReport> {
    let d = phi.dim();
    p.check_window(d)?;
    let (axes, tail) = phi.axes(cfg);
    let transform_integral = match &phi.factors {
        Some(factors) => {
            let mut product: QuadratureResult<f64> = QuadratureResult {
                value: 1.0,
                error_estimate: 0.0,
                evaluations: 0,
                converged: true,
            };
            for (factor, axis) in factors.iter().zip(&axes) {
                let r = integrated_fourier_transform(
                    &|x: &[f64]| factor(x[0]),
                    vec![*axis],
                    tail,
                    cfg,
                )?;
                product = QuadratureResult {
                    error_estimate: product.error_estimate * r.value.abs()
                        + r.error_estimate * product.value.abs(),
                    value: product.value * r.value,
                    evaluations: product.evaluations + r.evaluations,
                    converged: product.converged && r.converged,
                };
            }
            product
        }
        None => integrated_fourier_transform(&|x: &[f64]| phi.value(x), axes, tail, cfg)?,
    };
    let exponent = -(d as i32);
    let mixture = integrate_halfline_gamma(|t: f64| t.powi(exponent), p.pole(), cfg)?;
    let c = c_constant(p, d)?;
    let sift_value = transform_integral.value * mixture.value / c;
    let reference = phi.value(&vec![0.0; d]);
    let error_estimate = (transform_integral.error_estimate * mixture.value.abs()
        + mixture.error_estimate * transform_integral.value.abs())
        / c;
    Ok(DeltaTestReport {
        q: p.q(),
        d,
        test_function: phi.name().to_string(),
        sift_value,
        reference,
        relative_error: (sift_value - reference).abs() / reference.abs(),
        error_estimate,
        converged: transform_integral.converged && mixture.converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperstatisticsCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub gap: f64,
    pub rhs_error: f64,
    pub converged: bool,
}

/// Compares `e_q^z` with `int_0^inf gamma(z_q; t) e^{t z} dt`.
pub fn superstatistics_check(
    p: DeformationParameter,
    z: Complex64,
    cfg: &QuadratureConfig,
) -> Result<SuperstatisticsCheck> {
    if p.is_classical() {
        return Err(QError::Domain("the gamma mixture needs q > 1".into()).into());
    }
    if !(z.re < p.pole()) {
        return Err(QError::Domain(format!(
            "mixture representation needs Re z < z_q = {}, got {z}",
            p.pole()
        ))
        .into());
    }
    let lhs = q_exp(p, z)?.value;
    let rhs = integrate_halfline_gamma(|t: f64| (z * t).exp(), p.pole(), cfg)?;
    Ok(SuperstatisticsCheck {
        lhs,
        rhs: rhs.value,
        gap: (lhs - rhs.value).norm(),
        rhs_error: rhs.error_estimate,
        converged: rhs.converged,
    })
}

/// Classical transform `int f(y) e^{i k.y} d^d y`.
pub fn classical_fourier(
    f: &DensityFunction,
    k: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<Complex64>> {
    f.check_dim(k)?;
    forward_raw(f, qcore::DeformationParameter::classical(), k, 0.0, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dp(q: f64) -> DeformationParameter {
        DeformationParameter::new(q).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn density_constructors() {
        let g = DensityFunction::gaussian(2).unwrap();
        assert!((g.value(&[0.0, 0.0]) - 1.0 / PI).abs() < 1e-15);
        let u = DensityFunction::uniform_window(4.0).unwrap();
        assert_eq!(u.value(&[0.3]), 0.5);
        assert_eq!(u.value(&[1.2]), 0.0);
        assert!(DensityFunction::gaussian(4).is_err());
        let s = DensityFunction::sampled(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert!((s.value(&[0.5]) - 1.0).abs() < 1e-15);
        assert_eq!(s.value(&[2.5]), 0.0);
        assert!(DensityFunction::sampled(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(DensityFunction::sampled(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn forward_at_zero_wave_vector_is_mass() {
        let g = DensityFunction::gaussian(1).unwrap();
        let s = q_fourier_forward(&g, dp(1.3), &[0.0], &[0.7], &cfg()).unwrap();
        assert!((s.value - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        let u = DensityFunction::uniform(2, 1.0).unwrap();
        let s = q_fourier_forward(&u, dp(1.2), &[0.0, 0.0], &[0.1, 0.2], &cfg()).unwrap();
        assert!((s.value.re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn uniform_forward_matches_closed_form() {
        // int_{-1}^{1} c (1 - i s (y - x))^{-z} dy with s = (q-1) k c^{q-1}
        let (q, k, x, c) = (1.1, 2.5_f64, 0.3, 0.5_f64);
        let z = 1.0 / (q - 1.0);
        let s = (q - 1.0) * k * c.powf(q - 1.0);
        let prim = |u: f64| Complex64::new(1.0, -s * u).powf(1.0 - z);
        let closed = (prim(1.0 - x) - prim(-1.0 - x)) * c / (Complex64::i() * s * (z - 1.0));
        let u = DensityFunction::uniform(1, 1.0).unwrap();
        let got = q_fourier_forward(&u, dp(q), &[k], &[x], &cfg()).unwrap();
        assert!(
            (got.value - closed).norm() < 1e-10,
            "{} vs {}",
            got.value,
            closed
        );
    }

    #[test]
    fn window_is_enforced() {
        let g = DensityFunction::gaussian(2).unwrap();
        let r = q_fourier_forward(&g, dp(1.5), &[1.0, 0.0], &[0.0, 0.0], &cfg());
        assert!(matches!(r, Err(TransformError::Validity(_))));
        let r = q_fourier_invert_at(&g, dp(1.51), &[0.0, 0.0], &cfg());
        assert!(matches!(r, Err(TransformError::Validity(_))));
        assert!(matches!(
            delta_sift(&g, dp(1.5), &cfg()),
            Err(TransformError::Validity(_))
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let g = DensityFunction::gaussian(2).unwrap();
        let r = q_fourier_forward(&g, dp(1.2), &[1.0], &[0.0, 0.0], &cfg());
        assert!(matches!(r, Err(TransformError::DimensionMismatch { .. })));
    }

    #[test]
    fn boundary_points_are_rejected() {
        let u = DensityFunction::uniform_window(4.0).unwrap();
        for x in [1.0, 0.995, -1.0, 1.5] {
            assert!(matches!(
                q_fourier_invert_at(&u, dp(1.1), &[x], &cfg()),
                Err(TransformError::NotInterior { .. })
            ));
        }
    }

    #[test]
    fn superstatistics_domain() {
        let r = superstatistics_check(dp(1.5), Complex64::new(2.0, 1.0), &cfg());
        assert!(matches!(r, Err(TransformError::Core(QError::Domain(_)))));
        let r = superstatistics_check(dp(1.5), Complex64::new(0.0, 0.0), &cfg()).unwrap();
        assert!(r.gap < 1e-9);
    }

    #[test]
    fn classical_transform_of_gaussian() {
        let g = DensityFunction::gaussian(1).unwrap();
        let r = classical_fourier(&g, &[1.5], &cfg()).unwrap();
        assert!((r.value - Complex64::new((-1.5f64 * 1.5 / 4.0).exp(), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn shift_enters_only_through_k_dot_x() {
        let g = DensityFunction::gaussian(2).unwrap();
        let p = dp(1.3);
        let k = [1.2, -0.7];
        let a = q_fourier_forward(&g, p, &k, &[0.5, 0.1], &cfg()).unwrap();
        // same k.x = 0.53
        let b = q_fourier_forward(&g, p, &k, &[0.0, -0.53 / 0.7], &cfg()).unwrap();
        assert!((a.value - b.value).norm() < 1e-9);
    }

    #[test]
    fn conjugate_symmetry_in_k() {
        let g = DensityFunction::gaussian(1).unwrap();
        let p = dp(1.4);
        for (k, x) in [(0.8, 0.3), (3.0, -1.1), (10.0, 0.5)] {
            let a = q_fourier_forward(&g, p, &[k], &[x], &cfg()).unwrap();
            let b = q_fourier_forward(&g, p, &[-k], &[x], &cfg()).unwrap();
            assert!((a.value - b.value.conj()).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn constant_box_inverts_to_its_level() {
        let p = dp(1.1);
        for level in [0.5, 2.0] {
            let f = DensityFunction::constant_box(1, 1.0, level).unwrap();
            let inv = q_fourier_invert_at(&f, p, &[0.2], &cfg()).unwrap();
            let expected = c_constant(p, 1).unwrap() * level.powf(1.0 - (p.q() - 1.0));
            assert!((inv.k_integral - expected).abs() < 1e-4 * expected);
            assert!(
                (inv.value - level).abs() < 1e-4 * level,
                "{} vs {level}",
                inv.value
            );
        }
    }

    #[test]
    fn near_classical_forward_is_phased_fourier_transform() {
        let g = DensityFunction::gaussian(1).unwrap();
        let got = q_fourier_forward(&g, dp(1.001), &[1.0], &[0.0], &cfg()).unwrap();
        assert!((got.value - Complex64::new((-0.25f64).exp(), 0.0)).norm() < 1e-2);
        let (k, x) = (1.7, 0.6);
        let got = q_fourier_forward(&g, dp(1.001), &[k], &[x], &cfg()).unwrap();
        let want = Complex64::cis(-k * x) * (-k * k / 4.0).exp();
        assert!((got.value - want).norm() < 1e-2);
    }

    #[test]
    fn uniform_forward_against_tighter_reference() {
        let u = DensityFunction::uniform_window(4.0).unwrap();
        let k = [PI / 2.0];
        let got = q_fourier_forward(&u, dp(1.1), &k, &[0.0], &cfg()).unwrap();
        let tight = cfg().with_tolerances(1e-10, 1e-9);
        let reference = q_fourier_forward(&u, dp(1.1), &k, &[0.0], &tight).unwrap();
        assert!((got.value - reference.value).norm() < 1e-8);
    }

    #[test]
    fn gaussian_roundtrip() {
        let g = DensityFunction::gaussian(1).unwrap();
        let pts = vec![vec![-1.0], vec![0.0], vec![1.0]];
        let r = roundtrip_report(&g, dp(1.1), &pts, &cfg()).unwrap();
        assert!(r.max_relative_error < 1e-3);
        let r = roundtrip_report(&g, dp(1.0 + 1e-6), &pts, &cfg()).unwrap();
        assert!(r.max_relative_error < 1e-6, "{}", r.max_relative_error);
    }

    #[test]
    fn uniform_roundtrip_interior() {
        let u = DensityFunction::uniform_window(4.0).unwrap();
        let pts = vec![vec![-0.5], vec![0.0], vec![0.5]];
        let r = roundtrip_report(&u, dp(1.1), &pts, &cfg()).unwrap();
        assert!(r.max_relative_error < 1e-2, "{r:?}");
        assert_eq!(r.points[1].x, vec![0.0]);
    }

    #[test]
    fn gaussian_sift_one_dimension() {
        let g = DensityFunction::gaussian(1).unwrap();
        let r = delta_sift(&g, dp(1.3), &cfg()).unwrap();
        assert!(r.relative_error < 1e-4);
        assert!(r.converged);
    }

    #[test]
    fn superstatistics_examples() {
        let r = superstatistics_check(dp(1.1), Complex64::new(0.0, 2.0), &cfg()).unwrap();
        assert!(r.gap < 1e-8);
        let r = superstatistics_check(dp(1.5), Complex64::new(-1.0, 0.0), &cfg()).unwrap();
        assert!(r.gap < 1e-8);
    }
}
