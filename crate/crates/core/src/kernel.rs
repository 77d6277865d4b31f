//! Pointwise kernels on the unit disc.
//!
//! ```text
//! φ_w(z)    = (z − w)/(1 − z w̄)
//! g(z, w)   = 1 − |φ_w(z)|² = (1−|z|²)(1−|w|²)/|1 − z w̄|²
//! G_α(z, w) = (1 − z̄ w)^α · h(g(z, w))
//! ```
//!
//! Complex powers use the principal branch; `1 − z̄w` lies in the open right
//! half-plane whenever `|w| < 1` and `|z| ≤ 1`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{Alpha, HFunction, SeriesControl};

/// Rounding allowance for `|z|² = 1`; points within it of the unit circle are
/// treated as lying on it.
pub const BOUNDARY_SLACK: f64 = 4.0 * f64::EPSILON;

/// Default guard radius around the diagonal `z = w`.
pub const SINGULAR_GUARD: f64 = 1e-30;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A point of the closed unit disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    /// Accepts `|z| ≤ 1` (up to [`BOUNDARY_SLACK`]).
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain(format!("point {z} is not finite")));
        }
        if z.norm_sqr() > 1.0 + BOUNDARY_SLACK {
            return Err(Error::Domain(format!("point {z} lies outside the closed unit disc")));
        }
        Ok(Self(z))
    }

    /// Accepts only `|z| < 1`.
    pub fn interior(z: Complex64) -> Result<Self> {
        let p = Self::new(z)?;
        if p.is_boundary() {
            return Err(Error::Domain(format!("point {z} must lie strictly inside the unit disc")));
        }
        Ok(p)
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(r, theta))
    }

    /// `e^{iθ}` on the unit circle.
    pub fn on_circle(theta: f64) -> Self {
        Self(Complex64::from_polar(1.0, theta))
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }

    /// `1 − |z|²`, exactly zero on the unit circle.
    #[inline]
    pub fn one_minus_abs2(self) -> f64 {
        let x = self.0.re.abs();
        let y = self.0.im;
        let v = (1.0 - x) * (1.0 + x) - y * y;
        if v <= BOUNDARY_SLACK {
            0.0
        } else {
            v
        }
    }

    #[inline]
    pub fn is_boundary(self) -> bool {
        self.one_minus_abs2() == 0.0
    }
}

impl TryFrom<Complex64> for DiskPoint {
    type Error = Error;

    fn try_from(z: Complex64) -> Result<Self> {
        Self::new(z)
    }
}

fn require_interior(w: DiskPoint, name: &str) -> Result<()> {
    if w.is_boundary() {
        Err(Error::Domain(format!("{name} = {} must satisfy |{name}| < 1", w.value())))
    } else {
        Ok(())
    }
}

/// `g(z,w)` and `|φ_w(z)|² = 1 − g(z,w)`, each from its own closed form so that
/// both stay accurate at their respective small ends.
#[inline]
fn g_and_complement(z: DiskPoint, w: DiskPoint) -> (f64, f64) {
    let (zv, wv) = (z.value(), w.value());
    let den = (ONE - zv * wv.conj()).norm_sqr();
    let g = (z.one_minus_abs2() * w.one_minus_abs2() / den).min(1.0);
    let phi2 = (zv - wv).norm_sqr() / den;
    (g, phi2)
}

/// Möbius map `φ_w(z) = (z − w)/(1 − z w̄)`.
pub fn mobius(z: DiskPoint, w: DiskPoint) -> Result<Complex64> {
    require_interior(w, "w")?;
    Ok((z.value() - w.value()) / (ONE - z.value() * w.value().conj()))
}

/// `g(z,w) = (1−|z|²)(1−|w|²)/|1 − z w̄|²`, in `[0, 1]`.
pub fn g(z: DiskPoint, w: DiskPoint) -> Result<f64> {
    require_interior(w, "w")?;
    Ok(g_and_complement(z, w).0)
}

/// `base^γ = exp(γ Log base)` on the principal branch, restricted to
/// `Re(base) > 0`.
pub fn principal_pow(base: Complex64, gamma: f64) -> Result<Complex64> {
    if !(base.re > 0.0) || !base.im.is_finite() || !base.re.is_finite() {
        return Err(Error::Domain(format!("principal power needs Re(base) > 0, got {base}")));
    }
    if gamma == 0.0 {
        return Ok(ONE);
    }
    if base.im == 0.0 {
        return Ok(Complex64::new(base.re.powf(gamma), 0.0));
    }
    let (r, arg) = base.to_polar();
    Ok(Complex64::from_polar(r.powf(gamma), gamma * arg))
}

fn check_off_diagonal(z: DiskPoint, w: DiskPoint, guard: f64) -> Result<()> {
    let d = z.value() - w.value();
    if d == Complex64::new(0.0, 0.0) || d.norm() < guard {
        return Err(Error::Singularity(format!("z = {} coincides with w = {}", z.value(), w.value())));
    }
    Ok(())
}

/// Classical Green's function `G(z,w) = −log|φ_w(z)|²`.
pub fn green_classical(z: DiskPoint, w: DiskPoint) -> Result<f64> {
    require_interior(w, "w")?;
    check_off_diagonal(z, w, SINGULAR_GUARD)?;
    let (g, phi2) = g_and_complement(z, w);
    Ok(classical_from_parts(g, phi2))
}

#[inline]
fn classical_from_parts(g: f64, phi2: f64) -> f64 {
    if g == 0.0 {
        0.0
    } else if g < 0.5 {
        -(-g).ln_1p()
    } else {
        -phi2.ln()
    }
}

/// Green's function `G_α` for a fixed `α`, reusing the precomputed parts of
/// `h`. This is the form used inside quadrature loops.
#[derive(Debug, Clone)]
pub struct GreenKernel {
    h: HFunction,
    singular_guard: f64,
}

impl GreenKernel {
    pub fn new(alpha: Alpha, ctrl: SeriesControl) -> Result<Self> {
        Ok(Self { h: HFunction::new(alpha, ctrl)?, singular_guard: SINGULAR_GUARD })
    }

    pub fn with_default_control(alpha: Alpha) -> Result<Self> {
        Self::new(alpha, SeriesControl::default())
    }

    /// Radius below which `|z − w|` counts as the diagonal.
    pub fn with_singular_guard(mut self, guard: f64) -> Self {
        self.singular_guard = guard;
        self
    }

    pub fn alpha(&self) -> Alpha {
        self.h.alpha()
    }

    pub fn h(&self) -> &HFunction {
        &self.h
    }

    /// `G_α(z,w) = (1 − z̄w)^α h(g(z,w))`; exactly zero for `|z| = 1`.
    pub fn green(&self, z: DiskPoint, w: DiskPoint) -> Result<Complex64> {
        require_interior(w, "w")?;
        check_off_diagonal(z, w, self.singular_guard)?;
        if z.is_boundary() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let (g, phi2) = g_and_complement(z, w);
        let hv = self.h.eval_with_complement(g, phi2)?;
        let factor = principal_pow(ONE - z.value().conj() * w.value(), self.alpha().value())?;
        Ok(factor * hv)
    }

    /// Closed-form Wirtinger derivative `∂_z G_α(z,w)`,
    /// `F_{α,w}(z) = (1−|w|²)^{α+1}/(1 − z w̄)^{α+1} · (1−|z|²)^α/(w − z)`.
    pub fn f_deriv(&self, z: DiskPoint, w: DiskPoint) -> Result<Complex64> {
        f_deriv(self.alpha(), z, w)
    }
}

/// `G_α(z,w)`; see [`GreenKernel::green`].
pub fn green_alpha(alpha: Alpha, z: DiskPoint, w: DiskPoint, ctrl: &SeriesControl) -> Result<Complex64> {
    GreenKernel::new(alpha, *ctrl)?.green(z, w)
}

/// `F_{α,w}(z) = ∂_z G_α(z,w)` for `z ≠ w`, `|z| < 1`.
pub fn f_deriv(alpha: Alpha, z: DiskPoint, w: DiskPoint) -> Result<Complex64> {
    require_interior(z, "z")?;
    require_interior(w, "w")?;
    check_off_diagonal(z, w, SINGULAR_GUARD)?;
    let a = alpha.value();
    let (zv, wv) = (z.value(), w.value());
    let num = w.one_minus_abs2().powf(a + 1.0) * z.one_minus_abs2().powf(a);
    let den = principal_pow(ONE - zv * wv.conj(), a + 1.0)? * (wv - zv);
    Ok(num / den)
}

/// `K_α(z) = (1−|z|²)^{α+1}/|1 − z|^{α+2}`; at `α = 0` the Poisson kernel.
pub fn k_alpha(alpha: Alpha, z: DiskPoint) -> Result<f64> {
    require_interior(z, "z")?;
    let a = alpha.value();
    Ok(z.one_minus_abs2().powf(a + 1.0) / (ONE - z.value()).norm().powf(a + 2.0))
}

/// Bracket of the pointwise estimate for `|G_α|`, without its constant:
/// `(1−|w|²)^{α+1}(1−|z|²)^{α+1}/|1 − z̄w|^{α+2} + (1−|w|²)^α G(z,w)`.
pub fn gest_rhs(alpha: Alpha, z: DiskPoint, w: DiskPoint) -> Result<f64> {
    let classical = green_classical(z, w)?;
    let a = alpha.value();
    let ow = w.one_minus_abs2();
    let first = (ow * z.one_minus_abs2()).powf(a + 1.0) / (ONE - z.value().conj() * w.value()).norm().powf(a + 2.0);
    Ok(first + ow.powf(a) * classical)
}

/// Coarser estimate bracket `(1−|w|²)^α (1 + G(z,w))`.
pub fn gest2_rhs(alpha: Alpha, z: DiskPoint, w: DiskPoint) -> Result<f64> {
    let classical = green_classical(z, w)?;
    Ok(w.one_minus_abs2().powf(alpha.value()) * (1.0 + classical))
}
