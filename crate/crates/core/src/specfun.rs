//! The generalized logarithm
//!
//! ```text
//! h(s) = ∫₀^s t^α/(1−t) dt = Σ_{n≥0} s^{α+1+n}/(α+1+n),   0 ≤ s < 1,
//! ```
//!
//! which equals the incomplete beta function `B(s; α+1, 0)` and
//! `s^{α+1}/(α+1) · ₂F₁(1, α+1; α+2; s)`. At `α = 0` it reduces to `−log(1−s)`.
//!
//! Below `split_threshold` the power series is summed directly. Above it the
//! logarithmic growth is peeled off analytically,
//!
//! ```text
//! h(s) = −log(1−s) − J(s),   J(s) = ∫₀^s (1−t^α)/(1−t) dt,
//! ```
//!
//! and `J` is integrated with Gauss–Legendre panels. Its integrand extends
//! continuously to `t = 1` (value `α`); for `α < 0` it blows up like `t^α` at
//! the origin, so `[0, ε]` is handled by the series instead.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Left end of the `J` quadrature; `[0, ε]` goes through the power series.
const SERIES_HEAD: f64 = 1e-3;

/// Gauss–Legendre order used on each doubling panel of `J`.
const J_PANEL_ORDER: usize = 16;

fn j_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(J_PANEL_ORDER))
}

/// Weight exponent `α > −1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > -1.0 {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!("alpha must be a finite real > -1, got {value}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

/// Truncation and branch-selection parameters for the series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Absolute truncation tolerance of the power series.
    pub tol: f64,
    pub max_terms: usize,
    /// Arguments `s ≥ split_threshold` use the log-split branch.
    pub split_threshold: f64,
    /// When false the raw series is used for every `s`, which may exhaust
    /// `max_terms` close to `s = 1`.
    pub log_split: bool,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { tol: 1e-12, max_terms: 1_000_000, split_threshold: 0.5, log_split: true }
    }
}

impl SeriesControl {
    pub fn new(tol: f64, max_terms: usize, split_threshold: f64) -> Result<Self> {
        let ctrl = Self { tol, max_terms, split_threshold, log_split: true };
        ctrl.validate()?;
        Ok(ctrl)
    }

    pub fn without_log_split(mut self) -> Self {
        self.log_split = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Domain(format!("series tol must be positive, got {}", self.tol)));
        }
        if self.max_terms == 0 {
            return Err(Error::Domain("max_terms must be at least 1".into()));
        }
        if !(self.split_threshold > 0.0 && self.split_threshold < 1.0) {
            return Err(Error::Domain(format!("split_threshold must lie in (0,1), got {}", self.split_threshold)));
        }
        Ok(())
    }
}

/// `Σ_{n≥0} s^n/(a1+n)`, truncated once the geometric tail bound, scaled by
/// `prefactor`, drops below both `ctrl.tol` and machine precision.
fn reduced_series(a1: f64, s: f64, prefactor: f64, ctrl: &SeriesControl) -> Result<f64> {
    let mut sum = 0.0;
    let mut pow = 1.0;
    for n in 0..ctrl.max_terms {
        let k = a1 + n as f64;
        sum += pow / k;
        pow *= s;
        let tail = pow / ((k + 1.0) * (1.0 - s));
        if prefactor * tail <= ctrl.tol && tail <= f64::EPSILON * sum {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!(
        "power series for h at s = {s} did not reach tol {} within {} terms",
        ctrl.tol, ctrl.max_terms
    )))
}

/// Integrand of `J`, `(1 − t^α)/(1 − t)`, accurate up to `t → 1`.
#[inline]
fn j_integrand(alpha: f64, t: f64) -> f64 {
    -(alpha * t.ln()).exp_m1() / (1.0 - t)
}

/// `∫_lo^hi (1−t^α)/(1−t) dt` on panels whose endpoints double from `lo`,
/// so each panel sits at least its own length away from `t = 0`.
fn j_segment(alpha: f64, lo: f64, hi: f64) -> f64 {
    let rule = j_rule();
    let mut total = 0.0;
    let mut a = lo;
    while a < hi {
        let b = if 2.0 * a < hi { 2.0 * a } else { hi };
        total += rule.integrate(a, b, |t| j_integrand(alpha, t));
        a = b;
    }
    total
}

fn check_argument(s: f64) -> Result<()> {
    if (0.0..1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::Domain(format!("argument must lie in [0,1), got {s}")))
    }
}

/// `h(s)` for a fixed `α`, with `J(split_threshold)` precomputed so that each
/// evaluation above the split costs a single short quadrature.
#[derive(Debug, Clone)]
pub struct HFunction {
    alpha: Alpha,
    ctrl: SeriesControl,
    j_split: f64,
}

impl HFunction {
    pub fn new(alpha: Alpha, ctrl: SeriesControl) -> Result<Self> {
        ctrl.validate()?;
        let mut hf = Self { alpha, ctrl, j_split: 0.0 };
        if ctrl.log_split {
            let a = alpha.value();
            let head = SERIES_HEAD.min(ctrl.split_threshold);
            // J(head) = −log(1−head) − h(head)
            let j_head = -(-head).ln_1p() - hf.series(head)?;
            hf.j_split = j_head + j_segment(a, head, ctrl.split_threshold);
        }
        Ok(hf)
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn control(&self) -> &SeriesControl {
        &self.ctrl
    }

    fn series(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        let a1 = self.alpha.value() + 1.0;
        let prefactor = s.powf(a1);
        Ok(prefactor * reduced_series(a1, s, prefactor, &self.ctrl)?)
    }

    /// `J(s) = ∫₀^s (1−t^α)/(1−t) dt` for `s ≥ split_threshold`.
    fn j_upper(&self, s: f64) -> f64 {
        self.j_split + j_segment(self.alpha.value(), self.ctrl.split_threshold, s)
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        check_argument(s)?;
        self.eval_with_complement(s, 1.0 - s)
    }

    /// Evaluates `h(s)` given `1 − s` computed independently. Callers that know
    /// `1 − s` to full relative precision (e.g. `|φ_w(z)|²` near the diagonal)
    /// keep the `−log(1−s)` term accurate.
    pub fn eval_with_complement(&self, s: f64, one_minus_s: f64) -> Result<f64> {
        // s may round to 1 while the complement is still resolvable
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("argument must lie in [0,1), got {s}")));
        }
        if !(one_minus_s > 0.0 && one_minus_s <= 1.0) {
            return Err(Error::Domain(format!("complement 1-s must lie in (0,1], got {one_minus_s}")));
        }
        if !self.ctrl.log_split || s < self.ctrl.split_threshold {
            return self.series(s);
        }
        Ok(-one_minus_s.ln() - self.j_upper(s))
    }

    /// `₂F₁(1, α+1; α+2; x)`.
    pub fn hyp2f1(&self, x: f64) -> Result<f64> {
        check_argument(x)?;
        if x == 0.0 {
            return Ok(1.0);
        }
        let a1 = self.alpha.value() + 1.0;
        if !self.ctrl.log_split || x < self.ctrl.split_threshold {
            return Ok(a1 * reduced_series(a1, x, a1, &self.ctrl)?);
        }
        Ok(a1 * x.powf(-a1) * self.eval(x)?)
    }
}

/// `h(s) = ∫₀^s t^α/(1−t) dt`.
pub fn h(alpha: Alpha, s: f64, ctrl: &SeriesControl) -> Result<f64> {
    HFunction::new(alpha, *ctrl)?.eval(s)
}

/// `h'(s) = s^α/(1−s)`.
pub fn h_prime(alpha: Alpha, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("h' needs s in (0,1), got {s}")));
    }
    Ok(s.powf(alpha.value()) / (1.0 - s))
}

/// Zero-balanced Gauss hypergeometric function `₂F₁(1, α+1; α+2; x)`.
pub fn hyp2f1_zero_balanced(alpha: Alpha, x: f64, ctrl: &SeriesControl) -> Result<f64> {
    HFunction::new(alpha, *ctrl)?.hyp2f1(x)
}

/// Incomplete beta function `B(x; α+1, 0)`, identical to [`h`].
pub fn incomplete_beta_a_plus1_zero(alpha: Alpha, x: f64, ctrl: &SeriesControl) -> Result<f64> {
    h(alpha, x, ctrl)
}
