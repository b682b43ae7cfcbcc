//! Deformed special functions: the complex q-exponential and its real cutoff
//! form, q-products, the q-trigonometric series, the gamma mixture density
//! and the delta normalization constant `c(q, d)`.
//!
//! Everything here assumes `q >= 1`; `q == 1` is accepted as the classical
//! limit so that callers can run undeformed baselines through the same code.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;
use twofloat::TwoFloat;

/// Hard cap on the number of q-trigonometric series terms.
pub const MAX_SERIES_TERMS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("deformation parameter q = {0} is not a finite value >= 1")]
    InvalidDeformation(f64),
    #[error("q-exponential pole at z = {0}")]
    Pole(Complex64),
    #[error("q-exponential overflows at z = {0}")]
    Overflow(Complex64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("q = {q} is outside the validity window (1, 1 + 1/{d})")]
    Validity { q: f64, d: usize },
    #[error("series for x = {x} did not converge after {terms} terms")]
    Convergence { x: f64, terms: usize },
}

pub type Result<T> = std::result::Result<T, QError>;

/// The deformation parameter `q` together with its pole `z_q = 1/(q-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationParameter {
    q: f64,
    pole: f64,
}

impl DeformationParameter {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || q < 1.0 {
            return Err(QError::InvalidDeformation(q));
        }
        let pole = if q == 1.0 {
            f64::INFINITY
        } else {
            1.0 / (q - 1.0)
        };
        Ok(Self { q, pole })
    }

    /// The undeformed case `q = 1`.
    pub fn classical() -> Self {
        Self {
            q: 1.0,
            pole: f64::INFINITY,
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `z_q = 1/(q-1)`; infinite for `q = 1`.
    pub fn pole(&self) -> f64 {
        self.pole
    }

    pub fn is_classical(&self) -> bool {
        self.q == 1.0
    }

    /// Upper end `1 + 1/d` of the window in which the d-dimensional delta
    /// representation and transform inversion hold.
    pub fn window_upper(d: usize) -> f64 {
        1.0 + 1.0 / d as f64
    }

    /// Checks `1 < q < 1 + 1/d`.
    pub fn check_window(&self, d: usize) -> Result<()> {
        if d == 0 || self.q <= 1.0 || self.q >= Self::window_upper(d) {
            return Err(QError::Validity { q: self.q, d });
        }
        Ok(())
    }
}

/// A value of the complex q-exponential. `on_branch_cut` is set when the
/// argument lies on `(z_q, +inf)`; the value is then the limit taken from the
/// upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QExp {
    pub value: Complex64,
    pub on_branch_cut: bool,
}

/// Principal-branch complex q-exponential `[1 + (1-q) z]^{1/(1-q)}`.
///
/// The cut of the logarithm sits on `[z_q, +inf)`. The log-modulus is formed
/// with `ln_1p` so that the `q -> 1` limit does not lose digits.
pub fn q_exp(p: DeformationParameter, z: Complex64) -> Result<QExp> {
    if p.is_classical() {
        let value = z.exp();
        return if value.re.is_finite() && value.im.is_finite() {
            Ok(QExp {
                value,
                on_branch_cut: false,
            })
        } else {
            Err(QError::Overflow(z))
        };
    }
    // z_q itself is rarely representable, so the pole gets a few ulps of slack
    if (z - p.pole).norm() <= 4.0 * f64::EPSILON * p.pole {
        return Err(QError::Pole(z));
    }
    let shrink = 1.0 - p.q;
    let w = z * shrink;
    let base_re = 1.0 + w.re;
    let on_branch_cut = w.im == 0.0 && base_re < 0.0;
    let log_mod = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
    let arg = if on_branch_cut {
        // z + i0 maps to base - i0
        -PI
    } else {
        w.im.atan2(base_re)
    };
    let value = Complex64::from_polar((-p.pole * log_mod).exp(), -p.pole * arg);
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(QError::Overflow(z));
    }
    Ok(QExp {
        value,
        on_branch_cut,
    })
}

/// The q-plane wave `e_q^{i theta}` for real `theta`.
///
/// Same branch as [`q_exp`] but specialised for a purely imaginary argument,
/// where neither the pole nor the cut can be reached.
#[inline]
pub fn q_plane_wave(p: DeformationParameter, theta: f64) -> Complex64 {
    if p.is_classical() {
        return Complex64::cis(theta);
    }
    let s = (p.q - 1.0) * theta;
    let modulus = (-0.5 * p.pole * (s * s).ln_1p()).exp();
    Complex64::from_polar(modulus, p.pole * s.atan())
}

/// Real q-exponential with cutoff, `[1 + (1-q) x]_+^{1/(1-q)}`.
///
/// For `q > 1` the function diverges at `x = z_q`; it returns `+inf` for all
/// `x >= z_q`.
pub fn q_exp_real_cutoff(p: DeformationParameter, x: f64) -> f64 {
    if p.is_classical() {
        return x.exp();
    }
    let base = 1.0 + (1.0 - p.q) * x;
    if base <= 0.0 {
        return f64::INFINITY;
    }
    (-p.pole * ((1.0 - p.q) * x).ln_1p()).exp()
}

/// Complex deformed product `(z^{1-q} + w^{1-q} - 1)^{1/(1-q)}` on principal
/// branches. A zero operand gives zero, the `w -> 0` limit.
pub fn q_product(p: DeformationParameter, z: Complex64, w: Complex64) -> Result<Complex64> {
    if p.is_classical() {
        return Ok(z * w);
    }
    let zero = Complex64::new(0.0, 0.0);
    if z == zero || w == zero {
        return Ok(zero);
    }
    let shrink = 1.0 - p.q;
    let base = (z.ln() * shrink).exp() + (w.ln() * shrink).exp() - 1.0;
    if base.im == 0.0 && base.re <= 0.0 {
        return Err(QError::Domain(format!(
            "q-product base {base} lies on the principal-branch cut"
        )));
    }
    let value = (base.ln() / shrink).exp();
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(QError::Domain(format!(
            "q-product of {z} and {w} overflows"
        )));
    }
    Ok(value)
}

/// Real q-product `[x^{1-q} + y^{1-q} - 1]_+^{1/(1-q)}` for `x, y >= 0`.
pub fn q_product_real(p: DeformationParameter, x: f64, y: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(QError::Domain(format!(
            "real q-product needs nonnegative operands, got {x} and {y}"
        )));
    }
    if p.is_classical() {
        return Ok(x * y);
    }
    let shrink = 1.0 - p.q;
    let base = x.powf(shrink) + y.powf(shrink) - 1.0;
    Ok(base.max(0.0).powf(1.0 / shrink))
}

/// `omega_n(q) = prod_{k=0}^{n} [k (q-1) + 1]`.
pub fn omega(p: DeformationParameter, n: u32) -> f64 {
    (0..=n).map(|k| k as f64 * (p.q - 1.0) + 1.0).product()
}

/// Sum of the q-cosine and q-sine series, `(cos_q x, sin_q x)`.
///
/// Terms `omega_{m-1} x^m / m!` are generated by their ratio recurrence in
/// double-double arithmetic: near the radius of convergence the terms reach
/// ~1e8 before the alternating sum settles at O(1). Summation stops once a
/// term is below `tol` and smaller than its predecessor.
pub fn q_trig(p: DeformationParameter, x: f64, tol: f64) -> Result<(f64, f64)> {
    if !(x.abs() < p.pole) || !(tol > 0.0) {
        return Err(QError::Convergence { x, terms: 0 });
    }
    let step = p.q - 1.0;
    let mut term = TwoFloat::from(1.0);
    let mut cos = TwoFloat::from(1.0);
    let mut sin = TwoFloat::from(0.0);
    let mut prev = f64::INFINITY;
    for m in 1..=MAX_SERIES_TERMS {
        // a_m = a_{m-1} * x * (1 + (m-1)(q-1)) / m
        let factor = TwoFloat::new_mul((m - 1) as f64, step) + 1.0;
        term = term * factor * x / m as f64;
        let signed = if (m / 2) % 2 == 0 { term } else { -term };
        if m % 2 == 0 {
            cos += signed;
        } else {
            sin += signed;
        }
        let magnitude = f64::from(term).abs();
        if magnitude < tol && magnitude < prev {
            return Ok((f64::from(cos), f64::from(sin)));
        }
        prev = magnitude;
    }
    Err(QError::Convergence {
        x,
        terms: MAX_SERIES_TERMS,
    })
}

pub fn q_cos(p: DeformationParameter, x: f64, tol: f64) -> Result<f64> {
    q_trig(p, x, tol).map(|(c, _)| c)
}

pub fn q_sin(p: DeformationParameter, x: f64, tol: f64) -> Result<f64> {
    q_trig(p, x, tol).map(|(_, s)| s)
}

/// `ln Gamma(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(QError::Domain(format!("log_gamma needs x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// Gamma density with shape `eta` and rate `eta` (unit mean),
/// `eta^eta t^{eta-1} e^{-eta t} / Gamma(eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaMixtureDensity {
    eta: f64,
    log_norm: f64,
}

impl GammaMixtureDensity {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(QError::Domain(format!(
                "gamma mixture needs eta > 0, got {eta}"
            )));
        }
        Ok(Self {
            eta,
            log_norm: eta * eta.ln() - log_gamma(eta)?,
        })
    }

    /// The mixture that represents `e_q^z`, with shape `z_q`.
    pub fn for_deformation(p: DeformationParameter) -> Result<Self> {
        Self::new(p.pole())
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn density(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        if t == 0.0 {
            return match self.eta.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Greater) => 0.0,
                Some(std::cmp::Ordering::Equal) => 1.0,
                _ => f64::INFINITY,
            };
        }
        (self.log_norm + (self.eta - 1.0) * t.ln() - self.eta * t).exp()
    }

    /// Chernoff bound on `P(T > t)` for `t > 1`: `exp(-eta (t - 1 - ln t))`.
    pub fn upper_tail_bound(&self, t: f64) -> f64 {
        if t <= 1.0 {
            return 1.0;
        }
        (-self.eta * (t - 1.0 - t.ln())).exp()
    }
}

pub fn gamma_mixture(eta: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(QError::Domain(format!(
            "gamma mixture needs t >= 0, got {t}"
        )));
    }
    Ok(GammaMixtureDensity::new(eta)?.density(t))
}

/// Normalization `c(q, d) = (2 pi / (q-1))^d Gamma(z_q - d) / Gamma(z_q)` of
/// the d-dimensional q-delta, evaluated in log space.
pub fn c_constant(p: DeformationParameter, d: usize) -> Result<f64> {
    p.check_window(d)?;
    let zq = p.pole();
    let dim = d as f64;
    let log_c = dim * (2.0 * PI / (p.q() - 1.0)).ln() + log_gamma(zq - dim)? - log_gamma(zq)?;
    Ok(log_c.exp())
}
