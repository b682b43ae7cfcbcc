//! Adaptive quadrature over finite intervals, the real line, the half-line
//! (gamma weighted) and boxes of up to three dimensions.
//!
//! The workhorse is a 21-point Gauss-Kronrod rule with an embedded 10-point
//! Gauss rule, driven by bisection of the interval with the largest error.
//! Infinite axes are truncated at `k_max`; when the integrand is known to
//! decay like `|k|^{-alpha}` the omitted tails are extrapolated from samples
//! at `k_max` and `2 k_max`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::qcore::GammaMixtureDensity;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("integrand is not finite at {at:?}")]
    IntegrandError { at: Vec<f64> },
    #[error("integral did not converge: estimate {value}, error {error_estimate:e}")]
    NonConvergence { value: f64, error_estimate: f64 },
    #[error("tail estimate unreliable: decay constant {near:e} at k_max vs {far:e} at 2 k_max")]
    TailEstimateUnreliable { near: f64, far: f64 },
    #[error("box dimension {0} is not in 1..=3")]
    Dimension(usize),
}

pub type Result<T> = std::result::Result<T, QuadError>;

/// Values the integrators can accumulate: real and complex scalars.
pub trait QuadValue:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn norm(&self) -> f64;
    fn is_finite(&self) -> bool;
    /// Known uncertainty already attached to a sample, e.g. the error of an
    /// inner integral. Plain values are exact.
    fn noise(&self) -> f64 {
        0.0
    }
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

// Real and imaginary parts share every subdivision decision.
impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Truncation point of infinite axes.
    pub k_max: f64,
    /// Known algebraic decay exponent of the integrand on infinite axes.
    pub tail_decay_exponent: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
            k_max: 200.0,
            tail_decay_exponent: None,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_k_max(mut self, k_max: f64) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn with_tail_decay(mut self, alpha: Option<f64>) -> Self {
        self.tail_decay_exponent = alpha;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let tol_ok = (self.abs_tol > 0.0 || self.rel_tol > 0.0)
            && self.abs_tol >= 0.0
            && self.rel_tol >= 0.0;
        if !tol_ok {
            return Err(QuadError::InvalidConfig(
                "need abs_tol > 0 or rel_tol > 0, both nonnegative".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadError::InvalidConfig(
                "max_subdivisions must be >= 1".into(),
            ));
        }
        if !(self.k_max > 0.0 && self.k_max.is_finite()) {
            return Err(QuadError::InvalidConfig(format!(
                "k_max must be positive, got {}",
                self.k_max
            )));
        }
        if let Some(alpha) = self.tail_decay_exponent {
            if !(alpha > 1.0) {
                return Err(QuadError::InvalidConfig(format!(
                    "tail decay exponent must exceed 1, got {alpha}"
                )));
            }
        }
        Ok(())
    }

    /// Tolerance an estimate of size `magnitude` has to meet.
    pub fn tolerance(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude)
    }

    fn halved(&self) -> Self {
        Self {
            abs_tol: self.abs_tol / 2.0,
            rel_tol: self.rel_tol / 2.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: QuadValue> QuadratureResult<T> {
    /// Turns a non-converged result into [`QuadError::NonConvergence`].
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(QuadError::NonConvergence {
                value: self.value.norm(),
                error_estimate: self.error_estimate,
            })
        }
    }

    fn settle(mut self, cfg: &QuadratureConfig) -> Self {
        self.converged &= self.error_estimate <= cfg.tolerance(self.value.norm());
        self
    }
}

// 21-point Kronrod nodes on [0, 1]; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_382_886_740_978,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<T: QuadValue, F: FnMut(f64) -> T>(
    f: &mut F,
    a: f64,
    b: f64,
) -> Result<Segment<T>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut values = [T::zero(); 21];
    let mut sample = |x: f64| -> Result<T> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::IntegrandError { at: vec![x] })
        }
    };
    let fc = sample(center)?;
    values[20] = fc;
    let mut kronrod = fc * WGK[10];
    let mut gauss = T::zero();
    let mut abs_sum = fc.norm() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let lo = sample(center - dx)?;
        let hi = sample(center + dx)?;
        values[2 * j] = lo;
        values[2 * j + 1] = hi;
        kronrod = kronrod + (lo + hi) * WGK[j];
        abs_sum += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + (lo + hi) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = (fc - mean).norm() * WGK[10];
    for j in 0..10 {
        asc += ((values[2 * j] - mean).norm() + (values[2 * j + 1] - mean).norm()) * WGK[j];
    }
    let scale = half.abs();
    let res_abs = abs_sum * scale;
    let res_asc = asc * scale;
    let mut error = (kronrod - gauss).norm() * scale;
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error,
    })
}

fn adaptive<T: QuadValue, F: FnMut(f64) -> T>(
    f: &mut F,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<T>> {
    cfg.validate()?;
    if breaks.len() < 2 {
        return Err(QuadError::InvalidConfig(
            "need at least two breakpoints".into(),
        ));
    }
    for w in breaks.windows(2) {
        if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(QuadError::InvalidInterval { a: w[0], b: w[1] });
        }
    }
    let mut heap = BinaryHeap::new();
    let mut settled = Vec::new();
    let mut total = T::zero();
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        let seg = gauss_kronrod(f, w[0], w[1])?;
        total = total + seg.value;
        total_err += seg.error;
        heap.push(seg);
    }
    let mut evaluations = 21 * (breaks.len() - 1);
    let mut converged = false;
    loop {
        if total_err <= cfg.tolerance(total.norm()) {
            converged = true;
            break;
        }
        if heap.len() + settled.len() >= cfg.max_subdivisions {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow = (worst.b - worst.a)
            <= 100.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE);
        if too_narrow || mid <= worst.a || mid >= worst.b {
            settled.push(worst);
            continue;
        }
        let left = gauss_kronrod(f, worst.a, mid)?;
        let right = gauss_kronrod(f, mid, worst.b)?;
        evaluations += 42;
        total = total - worst.value + left.value + right.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum in position order; the running totals drift
    let mut segments: Vec<Segment<T>> = heap.into_vec();
    segments.extend(settled);
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
    let error_estimate = segments.iter().map(|s| s.error).sum::<f64>();
    Ok(QuadratureResult {
        value,
        error_estimate,
        evaluations,
        converged: converged && error_estimate <= cfg.tolerance(value.norm()),
    })
}

/// Adaptive integral of `f` over `[a, b]`. Endpoints are never sampled.
pub fn integrate_finite<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<T>> {
    if !(a < b) {
        return Err(QuadError::InvalidInterval { a, b });
    }
    adaptive(&mut f, &[a, b], cfg)
}

/// Like [`integrate_finite`] with the given interior breakpoints as the
/// initial partition. `breaks` must be strictly increasing.
pub fn integrate_with_breaks<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<T>> {
    adaptive(&mut f, breaks, cfg)
}

/// `0, 1, 4, 16, ...` below `k_max`, then `k_max`.
fn geometric_breaks(k_max: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let mut x = 1.0;
    while x < 0.75 * k_max {
        breaks.push(x);
        x *= 4.0;
    }
    breaks.push(k_max);
    breaks
}

struct Tail<T> {
    value: T,
    error: f64,
}

/// Extrapolates `int_{edge}^{inf} f` for `f(k) ~ A (k/edge)^{-alpha} +
/// B (k/edge)^{-alpha-2}`, fitting `A, B` to `near = f(edge)` and
/// `far = f(2 edge)`.
fn tail_extrapolate<T: QuadValue>(
    near: T,
    far: T,
    edge: f64,
    alpha: f64,
    cfg: &QuadratureConfig,
) -> Result<Tail<T>> {
    let scale = 2f64.powf(alpha);
    let far_scaled = far * scale;
    let near_noise = near.noise();
    let far_noise = far.noise() * scale;
    // A far sample lost in its own noise cannot pin the correction term.
    let resolved = far_scaled.is_finite() && far_scaled.norm() > far_noise;
    let (lead, correction) = if resolved {
        let correction = (near - far_scaled) * (4.0 / 3.0);
        (near - correction, correction)
    } else {
        (near, T::zero())
    };
    let value = lead * (edge / (alpha - 1.0)) + correction * (edge / (alpha + 1.0));
    let crude = edge
        * near
            .norm()
            .max(if resolved { far_scaled.norm() } else { 0.0 })
        / (alpha - 1.0);
    if crude > cfg.abs_tol && resolved {
        let (n, f) = (near.norm(), far_scaled.norm());
        if (near - far_scaled).norm() > 0.5 * n.max(f) + near_noise + far_noise {
            return Err(QuadError::TailEstimateUnreliable { near: n, far: f });
        }
    }
    // Sample noise travels inside `value` itself (see `Carried`), so only
    // the model error is added here.
    let mut error = correction.norm() * edge / (alpha + 1.0);
    if !resolved {
        error += 0.5 * near.norm() * edge / (alpha - 1.0);
    }
    Ok(Tail { value, error })
}

fn sample_finite<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, x: f64) -> Result<T> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadError::IntegrandError { at: vec![x] })
    }
}

/// Integral over the whole real line.
///
/// The core `[-k_max, k_max]` is integrated adaptively from a geometric
/// initial partition. With `tail_decay_exponent = Some(alpha)` both tails are
/// extrapolated; without it the truncation is assumed harmless and
/// `2 |f(+-k_max)| k_max` is added to the error estimate.
pub fn integrate_real_line<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<T>> {
    cfg.validate()?;
    let k = cfg.k_max;
    let right = geometric_breaks(k);
    let mut breaks: Vec<f64> = right.iter().rev().map(|x| -x).collect();
    breaks.extend_from_slice(&right[1..]);
    let core_cfg = if cfg.tail_decay_exponent.is_some() {
        cfg.halved()
    } else {
        cfg.clone()
    };
    let core = adaptive(&mut f, &breaks, &core_cfg)?;
    let mut result = QuadratureResult {
        converged: core.converged,
        ..core
    };
    let hi = sample_finite(&mut f, k)?;
    let lo = sample_finite(&mut f, -k)?;
    result.evaluations += 2;
    match cfg.tail_decay_exponent {
        Some(alpha) => {
            let hi_far = sample_finite(&mut f, 2.0 * k)?;
            let lo_far = sample_finite(&mut f, -2.0 * k)?;
            result.evaluations += 2;
            for (near, far) in [(hi, hi_far), (lo, lo_far)] {
                let tail = tail_extrapolate(near, far, k, alpha, cfg)?;
                result.value = result.value + tail.value;
                result.error_estimate += tail.error;
            }
        }
        None => result.error_estimate += 2.0 * (hi.norm() + lo.norm()) * k,
    }
    Ok(result.settle(cfg))
}

/// Integral over `[lo, +inf)`, truncated at `lo + k_max` with the same tail
/// treatment as [`integrate_real_line`].
pub fn integrate_half_line<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    lo: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<T>> {
    cfg.validate()?;
    let edge = lo + cfg.k_max;
    if !(edge > 0.0) || !lo.is_finite() {
        return Err(QuadError::InvalidInterval {
            a: lo,
            b: f64::INFINITY,
        });
    }
    let breaks: Vec<f64> = geometric_breaks(cfg.k_max).iter().map(|x| lo + x).collect();
    let core_cfg = if cfg.tail_decay_exponent.is_some() {
        cfg.halved()
    } else {
        cfg.clone()
    };
    let mut result = adaptive(&mut f, &breaks, &core_cfg)?;
    let near = sample_finite(&mut f, edge)?;
    result.evaluations += 1;
    match cfg.tail_decay_exponent {
        Some(alpha) => {
            let far = sample_finite(&mut f, 2.0 * edge)?;
            result.evaluations += 1;
            let tail = tail_extrapolate(near, far, edge, alpha, cfg)?;
            result.value = result.value + tail.value;
            result.error_estimate += tail.error;
        }
        None => result.error_estimate += 2.0 * near.norm() * edge,
    }
    Ok(result.settle(cfg))
}

/// `int_0^inf f(t) gamma(eta; t) dt` for the unit-mean gamma density.
///
/// The split point `t_cut` is where the gamma tail bound falls below
/// `abs_tol / 10`; `[0, t_cut]` is integrated directly and the remainder
/// after the substitution `t = t_cut / u`, so integrands that grow slower
/// than the density decays are still handled.
pub fn integrate_halfline_gamma<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    eta: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<T>> {
    cfg.validate()?;
    let density =
        GammaMixtureDensity::new(eta).map_err(|e| QuadError::InvalidConfig(e.to_string()))?;
    let budget = (cfg.abs_tol.max(f64::MIN_POSITIVE) / 10.0).max(1e-300);
    let mut t_cut = 2.0;
    while density.upper_tail_bound(t_cut) > budget {
        t_cut *= 1.5;
    }
    let mut weighted = |t: f64| {
        let g = density.density(t);
        if g == 0.0 {
            T::zero()
        } else {
            f(t) * g
        }
    };
    let core_cfg = cfg.halved();
    let mode = (1.0 - 1.0 / eta).max(0.0);
    let mut breaks = vec![0.0];
    if mode > 0.05 {
        breaks.push(mode);
    }
    if t_cut > 1.5 {
        breaks.push(1.5);
    }
    breaks.push(t_cut);
    let core = adaptive(&mut weighted, &breaks, &core_cfg)?;
    let tail = adaptive(
        &mut |u: f64| weighted(t_cut / u) * (t_cut / (u * u)),
        &[0.0, 1.0],
        &core_cfg,
    )?;
    Ok(QuadratureResult {
        value: core.value + tail.value,
        error_estimate: core.error_estimate + tail.error_estimate,
        evaluations: core.evaluations + tail.evaluations,
        converged: core.converged && tail.converged,
    }
    .settle(cfg))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    Finite {
        lo: f64,
        hi: f64,
    },
    RealLine,
    /// `[lo, +inf)`
    HalfLine {
        lo: f64,
    },
}

/// Integration domain of dimension 1 to 3, one [`Axis`] per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    axes: Vec<Axis>,
}

impl BoxDomain {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(QuadError::Dimension(axes.len()));
        }
        for axis in &axes {
            match *axis {
                Axis::Finite { lo, hi } if !(lo < hi) || !lo.is_finite() || !hi.is_finite() => {
                    return Err(QuadError::InvalidInterval { a: lo, b: hi })
                }
                Axis::HalfLine { lo } if !lo.is_finite() => {
                    return Err(QuadError::InvalidInterval {
                        a: lo,
                        b: f64::INFINITY,
                    })
                }
                _ => {}
            }
        }
        Ok(Self { axes })
    }

    pub fn cube(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![Axis::Finite { lo, hi }; d])
    }

    pub fn real_space(d: usize) -> Result<Self> {
        Self::new(vec![Axis::RealLine; d])
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }
}

/// An integrated value paired with the error estimate of the inner integral
/// that produced it, so inner errors integrate alongside the value.
#[derive(Debug, Clone, Copy)]
struct Carried<T>(T, f64);

impl<T: QuadValue> Add for Carried<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Carried(self.0 + o.0, self.1 + o.1)
    }
}
impl<T: QuadValue> Sub for Carried<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Carried(self.0 - o.0, self.1 - o.1)
    }
}
impl<T: QuadValue> Mul<f64> for Carried<T> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Carried(self.0 * s, self.1 * s)
    }
}
impl<T: QuadValue> QuadValue for Carried<T> {
    fn zero() -> Self {
        Carried(T::zero(), 0.0)
    }
    fn norm(&self) -> f64 {
        self.0.norm()
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite() && self.1.is_finite()
    }
    fn noise(&self) -> f64 {
        self.1.abs() + self.0.noise()
    }
}

/// One-dimensional integral along `axis`.
pub fn integrate_axis<T: QuadValue, F: FnMut(f64) -> T>(
    axis: &Axis,
    f: F,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<T>> {
    match *axis {
        Axis::Finite { lo, hi } => integrate_finite(f, lo, hi, cfg),
        Axis::RealLine => integrate_real_line(f, cfg),
        Axis::HalfLine { lo } => integrate_half_line(f, lo, cfg),
    }
}

fn nested<T: QuadValue>(
    f: &mut dyn FnMut(&[f64]) -> T,
    axes: &[Axis],
    point: &mut [f64],
    depth: usize,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<T>> {
    if depth + 1 == axes.len() {
        return integrate_axis(
            &axes[depth],
            |t| {
                point[depth] = t;
                f(point)
            },
            cfg,
        );
    }
    let mut failure = None;
    let mut inner_converged = true;
    let mut evaluations = 0;
    let outer = integrate_axis(
        &axes[depth],
        |t| {
            if failure.is_some() {
                return Carried::zero();
            }
            point[depth] = t;
            match nested(&mut *f, axes, point, depth + 1, cfg) {
                Ok(r) => {
                    inner_converged &= r.converged;
                    evaluations += r.evaluations;
                    Carried(r.value, r.error_estimate)
                }
                Err(e) => {
                    failure = Some(e);
                    Carried::zero()
                }
            }
        },
        cfg,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let outer = outer?;
    Ok(QuadratureResult {
        value: outer.value.0,
        error_estimate: outer.error_estimate + outer.value.1.abs(),
        evaluations,
        converged: outer.converged && inner_converged,
    })
}

/// Iterated integral over `dom`; the last axis is innermost. The reported
/// error is the outer estimate plus the integrated inner estimates, a
/// deliberately pessimistic bound; `converged` means every one-dimensional
/// stage met its own tolerance.
pub fn integrate_box<T: QuadValue, F: FnMut(&[f64]) -> T>(
    mut f: F,
    dom: &BoxDomain,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<T>> {
    cfg.validate()?;
    let mut point = vec![0.0; dom.dimension()];
    let mut checked = |x: &[f64]| f(x);
    nested(&mut checked, dom.axes(), &mut point, 0, cfg)
}

/// Iterated integral of an integrand that is itself an integral. The inner
/// error estimates are integrated alongside the values and added to the
/// outer estimate; any inner failure aborts the whole integral.
pub fn integrate_box_composed<T: QuadValue, F>(
    mut f: F,
    dom: &BoxDomain,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<T>>
where
    F: FnMut(&[f64]) -> Result<QuadratureResult<T>>,
{
    let mut failure = None;
    let mut inner_converged = true;
    let mut evaluations = 0;
    let outer = integrate_box(
        |x: &[f64]| {
            if failure.is_some() {
                return Carried::zero();
            }
            match f(x) {
                Ok(r) => {
                    inner_converged &= r.converged;
                    evaluations += r.evaluations;
                    Carried(r.value, r.error_estimate)
                }
                Err(e) => {
                    failure = Some(e);
                    Carried::zero()
                }
            }
        },
        dom,
        cfg,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let outer = outer?;
    Ok(QuadratureResult {
        value: outer.value.0,
        error_estimate: outer.error_estimate + outer.value.1.abs(),
        evaluations,
        converged: outer.converged && inner_converged,
    })
}
