//! Numerical checks of the distributional identity `L_α G_α(·,w) = δ_w`, the
//! circle-mean formulas and the integral estimates for `G_α`.
//!
//! Test functions are polynomial bumps `a·(ρ² − |z−c|²)₊^k`, whose Wirtinger
//! derivatives are available in closed form.

mod report;

pub use report::{run_suite, CheckRow, Report, Suite};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{green_classical, k_alpha, DiskPoint, GreenKernel};
use crate::potential::{moment_check, Measure};
use crate::quadrature::{
    ball_integral, circle_mean_converged, disc_integral, radial_integral_with_breaks, Ball, QuadratureSpec,
};
use crate::specfun::{h, Alpha, SeriesControl};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative tolerance for the circle means `I1`, `M_α` and `I2`.
const MEAN_TOL: f64 = 1e-12;

/// `φ(z) = amplitude · (radius² − |z − center|²)₊^power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    center: DiskPoint,
    radius: f64,
    power: u32,
    amplitude: Complex64,
}

impl TestFunction {
    pub fn new(center: Complex64, radius: f64, power: u32, amplitude: Complex64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("bump radius must be positive, got {radius}")));
        }
        if !(center.norm() + radius < 1.0) {
            return Err(Error::Domain(format!("bump support B({center}, {radius}) is not compactly inside the disc")));
        }
        if power < 3 {
            return Err(Error::Domain(format!("bump power must be at least 3, got {power}")));
        }
        if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
            return Err(Error::Domain("bump amplitude must be finite".into()));
        }
        Ok(Self { center: DiskPoint::interior(center)?, radius, power, amplitude })
    }

    pub fn center(&self) -> Complex64 {
        self.center.value()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn support(&self) -> Ball {
        Ball { center: self.center.value(), radius: self.radius }
    }

    /// `u = ρ² − |z−c|²` and `z − c`, or `None` off the open support.
    fn local(&self, z: Complex64) -> Option<(f64, Complex64)> {
        let dz = z - self.center.value();
        let u = self.radius * self.radius - dz.norm_sqr();
        (u > 0.0).then_some((u, dz))
    }

    pub fn phi(&self, z: Complex64) -> Complex64 {
        match self.local(z) {
            Some((u, _)) => self.amplitude * u.powi(self.power as i32),
            None => ZERO,
        }
    }

    /// `∂φ = −k u^{k−1} (z̄ − c̄) a`.
    pub fn d_phi(&self, z: Complex64) -> Complex64 {
        match self.local(z) {
            Some((u, dz)) => -(self.power as f64) * u.powi(self.power as i32 - 1) * dz.conj() * self.amplitude,
            None => ZERO,
        }
    }

    /// `∂̄φ = −k u^{k−1} (z − c) a`.
    pub fn dbar_phi(&self, z: Complex64) -> Complex64 {
        match self.local(z) {
            Some((u, dz)) => -(self.power as f64) * u.powi(self.power as i32 - 1) * dz * self.amplitude,
            None => ZERO,
        }
    }

    /// `∂∂̄φ = a (k(k−1) u^{k−2} |z−c|² − k u^{k−1})`.
    pub fn ddbar_phi(&self, z: Complex64) -> Complex64 {
        match self.local(z) {
            Some((u, dz)) => {
                let k = self.power as f64;
                let k_ = self.power as i32;
                self.amplitude * (k * (k - 1.0) * u.powi(k_ - 2) * dz.norm_sqr() - k * u.powi(k_ - 1))
            }
            None => ZERO,
        }
    }
}

/// Formal adjoint `L̄_α φ = −∂((1−|z|²)^{−α} ∂̄φ)`, expanded as
/// `−(1−|z|²)^{−α} (∂∂̄φ + α z̄ (1−|z|²)^{−1} ∂̄φ)`.
pub fn l_adjoint_apply(alpha: Alpha, tf: &TestFunction, z: DiskPoint) -> Complex64 {
    let zv = z.value();
    if tf.local(zv).is_none() {
        return ZERO;
    }
    let a = alpha.value();
    let om = z.one_minus_abs2();
    -om.powf(-a) * (tf.ddbar_phi(zv) + a * zv.conj() / om * tf.dbar_phi(zv))
}

/// Pairing `∫_𝔻 G_α(z,w) L̄_α φ(z) dA(z)`, which should reproduce `φ(w)`.
///
/// The integral runs over the support of `φ`, on a polar grid centred at `w`
/// when `w` lies inside it.
pub fn delta_test(alpha: Alpha, w: DiskPoint, tf: &TestFunction, spec: &QuadratureSpec) -> Result<Complex64> {
    let kernel = GreenKernel::with_default_control(alpha)?;
    pairing(&kernel, w, tf, spec)
}

fn pairing(kernel: &GreenKernel, w: DiskPoint, tf: &TestFunction, spec: &QuadratureSpec) -> Result<Complex64> {
    if w.is_boundary() {
        return Err(Error::Domain(format!("w = {} must satisfy |w| < 1", w.value())));
    }
    let support = tf.support();
    let local = if support.contains_interior(w.value()) {
        spec.with_singular_center(w)
    } else {
        spec.without_singular_center()
    };
    let alpha = kernel.alpha();
    let first_err = std::sync::Mutex::new(None);
    let v = ball_integral(
        |zv| {
            let z = DiskPoint::new(zv).expect("support lies inside the disc");
            match kernel.green(z, w) {
                Ok(g) => g * l_adjoint_apply(alpha, tf, z),
                Err(e) => {
                    first_err.lock().unwrap().get_or_insert(e);
                    Complex64::new(f64::NAN, 0.0)
                }
            }
        },
        support,
        &local,
    );
    if let Some(e) = first_err.into_inner().unwrap() {
        return Err(e);
    }
    v
}

/// `∫ φ dμ = Σ weight · φ(location)` for an atomic measure.
pub fn pairing_target(mu: &Measure, tf: &TestFunction) -> Complex64 {
    mu.atoms.iter().map(|a| a.weight * tf.phi(a.location().value())).sum()
}

/// Pairing `⟨G_α^μ, L̄_α φ⟩` for an atomic measure, by linearity a weighted
/// sum of [`delta_test`] values. Should reproduce [`pairing_target`].
pub fn potential_delta_test(alpha: Alpha, mu: &Measure, tf: &TestFunction, spec: &QuadratureSpec) -> Result<Complex64> {
    if !mu.is_atomic() {
        return Err(Error::InvalidMeasure("the potential pairing supports atomic measures only".into()));
    }
    moment_check(mu, alpha)?;
    let kernel = GreenKernel::with_default_control(alpha)?;
    let mut acc = ZERO;
    for atom in &mu.atoms {
        acc += atom.weight * pairing(&kernel, atom.location(), tf, spec)?;
    }
    Ok(acc)
}

fn mean_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    spec.without_singular_center().with_tol(MEAN_TOL)
}

fn check_mean_radius(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must lie in [0,1), got {r}")))
    }
}

/// `I1(r,w) = ∫ (1−r²)^{α+1} / |1 − r e^{−iθ} w|^{α+2} dθ/2π`.
pub fn i1(alpha: Alpha, r: f64, w: DiskPoint, spec: &QuadratureSpec) -> Result<f64> {
    check_mean_radius(r)?;
    if w.is_boundary() {
        return Err(Error::Domain(format!("w = {} must satisfy |w| < 1", w.value())));
    }
    let a = alpha.value();
    let num = ((1.0 - r) * (1.0 + r)).powf(a + 1.0);
    let wv = w.value();
    let m = circle_mean_converged(
        |z| Complex64::new(num / (1.0 - z.conj() * wv).norm().powf(a + 2.0), 0.0),
        r,
        &mean_spec(spec),
    )?;
    Ok(m.re)
}

/// `M_α(r) = ∫ K_α(r e^{iθ}) dθ/2π`.
pub fn m_alpha(alpha: Alpha, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_mean_radius(r)?;
    let m = circle_mean_converged(
        |z| {
            let z = DiskPoint::new(z).expect("circle inside the disc");
            Complex64::new(k_alpha(alpha, z).unwrap_or(f64::NAN), 0.0)
        },
        r,
        &mean_spec(spec),
    )?;
    Ok(m.re)
}

fn check_i2_args(r: f64, w: DiskPoint) -> Result<()> {
    check_mean_radius(r)?;
    if w.is_boundary() {
        return Err(Error::Domain(format!("w = {} must satisfy |w| < 1", w.value())));
    }
    if r == 0.0 && w.value() == ZERO {
        return Err(Error::Singularity("the circle r = 0 passes through the pole w = 0".into()));
    }
    Ok(())
}

/// Closed form of the classical circle mean:
/// `−log|w|²` for `r ≤ |w|`, `−log r²` for `r > |w|`. At `r = |w|` both agree.
pub fn i2_closed(r: f64, w: DiskPoint) -> Result<f64> {
    check_i2_args(r, w)?;
    let aw = w.value().norm();
    Ok(if r < aw { -2.0 * aw.ln() } else { -2.0 * r.ln() })
}

/// Trapezoidal circle mean of the classical Green's function `G(re^{iθ}, w)`.
pub fn i2_quad(r: f64, w: DiskPoint, spec: &QuadratureSpec) -> Result<f64> {
    check_i2_args(r, w)?;
    let m = circle_mean_converged(
        |z| {
            let z = DiskPoint::new(z).expect("circle inside the disc");
            Complex64::new(green_classical(z, w).unwrap_or(f64::NAN), 0.0)
        },
        r,
        &mean_spec(spec),
    )?;
    Ok(m.re)
}

/// `∫_𝔻 |G_α(z,w)| dA(z)` and its ratio to `(1−|w|²)^{α+1}`.
pub fn area_bound_check(alpha: Alpha, w: DiskPoint, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    if w.is_boundary() {
        return Err(Error::Domain(format!("w = {} must satisfy |w| < 1", w.value())));
    }
    let kernel = GreenKernel::with_default_control(alpha)?;
    let local = spec.with_singular_center(w);
    let lhs = disc_integral(
        |zv| {
            let z = DiskPoint::new(zv).expect("node inside the disc");
            Complex64::new(kernel.green(z, w).map(|g| g.norm()).unwrap_or(f64::NAN), 0.0)
        },
        &local,
    )?
    .re;
    Ok((lhs, lhs / w.one_minus_abs2().powf(alpha.value() + 1.0)))
}

/// Right-hand side of `h(s) ≤ s^{α+1}/(α+1) − s^{α+1} log(1−s)`.
pub fn h_estimate_bound(alpha: Alpha, s: f64) -> f64 {
    let a1 = alpha.value() + 1.0;
    let sa = s.powf(a1);
    sa / a1 - sa * (-s).ln_1p()
}

/// Whether `h(s)` satisfies the constant-free estimate at `s ∈ [0,1)`.
pub fn h_estimate_check(alpha: Alpha, s: f64) -> Result<bool> {
    let lhs = h(alpha, s, &SeriesControl::default())?;
    Ok(lhs <= h_estimate_bound(alpha, s))
}

/// `∫₀¹ I2(r,w) 2r dr`, which equals `∫_𝔻 G(z,w) dA(z) = 1 − |w|²`.
pub fn i2_area(w: DiskPoint, spec: &QuadratureSpec) -> Result<f64> {
    // the log singularity at r = 0 (for w = 0) needs deep grading
    let deep = QuadratureSpec { grading_levels: spec.grading_levels.max(40), ..spec.without_singular_center() };
    let aw = w.value().norm();
    radial_integral_with_breaks(
        |r| if r > 0.0 || aw > 0.0 { 2.0 * r * i2_closed(r, w).unwrap_or(f64::NAN) } else { 0.0 },
        &[aw],
        &deep,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Atom;
    use crate::quadrature::radial_integral;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn p(re: f64, im: f64) -> DiskPoint {
        DiskPoint::new(c(re, im)).unwrap()
    }

    fn bump() -> TestFunction {
        TestFunction::new(c(0.0, 0.0), 0.5, 4, c(1.0, 0.0)).unwrap()
    }

    #[test]
    fn test_function_validation() {
        assert!(TestFunction::new(c(0.6, 0.0), 0.4, 4, c(1.0, 0.0)).is_err());
        assert!(TestFunction::new(c(0.0, 0.0), 0.5, 2, c(1.0, 0.0)).is_err());
        assert!(TestFunction::new(c(0.0, 0.0), -0.1, 3, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn test_function_examples() {
        let tf = TestFunction::new(c(0.1, -0.2), 0.3, 5, c(2.0, -1.0)).unwrap();
        let out = c(0.5, 0.5);
        assert_eq!((tf.phi(out), tf.dbar_phi(out), tf.ddbar_phi(out)), (ZERO, ZERO, ZERO));
        let cz = tf.center();
        assert_eq!(tf.dbar_phi(cz), ZERO);
        let want = -5.0 * 0.3f64.powi(8) * c(2.0, -1.0);
        assert!((tf.ddbar_phi(cz) - want).norm() < 1e-15);
    }

    #[test]
    fn wirtinger_finite_differences() {
        let tf = TestFunction::new(c(0.1, 0.05), 0.6, 4, c(0.5, 2.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-5;
        let (ex, ey) = (c(h, 0.0), c(0.0, h));
        for _ in 0..20 {
            let z = tf.center() + Complex64::from_polar(0.55 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..6.3));
            let dx = (tf.phi(z + ex) - tf.phi(z - ex)) / (2.0 * h);
            let dy = (tf.phi(z + ey) - tf.phi(z - ey)) / (2.0 * h);
            let dbar = 0.5 * (dx + c(0.0, 1.0) * dy);
            let d = 0.5 * (dx - c(0.0, 1.0) * dy);
            assert!((dbar - tf.dbar_phi(z)).norm() <= 1e-6 * tf.dbar_phi(z).norm());
            assert!((d - tf.d_phi(z)).norm() <= 1e-6 * tf.d_phi(z).norm());
            let gx = (tf.dbar_phi(z + ex) - tf.dbar_phi(z - ex)) / (2.0 * h);
            let gy = (tf.dbar_phi(z + ey) - tf.dbar_phi(z - ey)) / (2.0 * h);
            let ddbar = 0.5 * (gx - c(0.0, 1.0) * gy);
            assert!((ddbar - tf.ddbar_phi(z)).norm() <= 1e-6 * tf.ddbar_phi(z).norm());
        }
    }

    #[test]
    fn adjoint_examples() {
        let tf = bump();
        let z = p(0.1, 0.2);
        assert_eq!(l_adjoint_apply(a(0.0), &tf, z), -tf.ddbar_phi(z.value()));
        assert_eq!(l_adjoint_apply(a(1.3), &tf, p(0.7, 0.0)), ZERO);
    }

    #[test]
    fn adjoint_matches_divergence_form() {
        // −∂(W ∂̄φ) by central differences of W ∂̄φ
        let tf = TestFunction::new(c(0.2, 0.1), 0.5, 5, c(1.0, 1.0)).unwrap();
        let alpha = a(1.5);
        let flux = |z: Complex64| (1.0 - z.norm_sqr()).powf(-1.5) * tf.dbar_phi(z);
        let h = 1e-5;
        for &z in &[c(0.3, 0.2), c(0.0, -0.1), c(0.5, 0.3)] {
            let gx = (flux(z + h) - flux(z - h)) / (2.0 * h);
            let gy = (flux(z + c(0.0, h)) - flux(z - c(0.0, h))) / (2.0 * h);
            let fd = -0.5 * (gx - c(0.0, 1.0) * gy);
            let v = l_adjoint_apply(alpha, &tf, DiskPoint::new(z).unwrap());
            assert!((fd - v).norm() <= 1e-6 * v.norm(), "{z}: {fd} vs {v}");
        }
    }

    #[test]
    fn adjoint_integrates_to_zero() {
        let tf = TestFunction::new(c(0.2, -0.1), 0.6, 4, c(1.0, 0.0)).unwrap();
        let spec = QuadratureSpec::default();
        for &alpha in &[-0.5, 0.0, 2.0] {
            let f = |z: Complex64| l_adjoint_apply(a(alpha), &tf, DiskPoint::new(z).unwrap());
            let scale = ball_integral(|z| Complex64::new(f(z).norm(), 0.0), tf.support(), &spec).unwrap().re;
            let on_support = ball_integral(f, tf.support(), &spec).unwrap();
            assert!(on_support.norm() < 1e-12 * scale, "α={alpha}: {on_support}");
            // the whole-disc grid cuts through the C¹ edge of the support
            let whole = disc_integral(f, &spec).unwrap();
            assert!(whole.norm() < 1e-4 * scale, "α={alpha}: {whole} vs {scale}");
        }
    }

    #[test]
    fn delta_alpha_zero_against_radial_oracle() {
        // for a radial bump centred at w = 0 the pairing is one-dimensional:
        // ∫₀^ρ −log r² · (−∂∂̄φ)(r) 2r dr
        let tf = bump();
        let radial = radial_integral(
            |t| {
                let r = 0.5 * t;
                0.5 * 2.0 * r * 2.0 * r.ln() * tf.ddbar_phi(c(r, 0.0)).re
            },
            &QuadratureSpec { grading_levels: 40, ..QuadratureSpec::default() },
        )
        .unwrap();
        assert!((radial - 0.5f64.powi(8)).abs() < 1e-12);
        let v = delta_test(a(0.0), p(0.0, 0.0), &tf, &QuadratureSpec::default()).unwrap();
        assert!((v - c(0.5f64.powi(8), 0.0)).norm() < 1e-9, "{v}");
    }

    #[test]
    fn delta_examples() {
        let spec = QuadratureSpec::default();
        let tf = bump();
        let v = delta_test(a(1.0), p(0.2, 0.0), &tf, &spec).unwrap();
        assert!((v - c(0.21f64.powi(4), 0.0)).norm() < 1e-6, "{v}");
        let out = delta_test(a(0.5), p(0.7, 0.1), &tf, &spec).unwrap();
        assert!(out.norm() <= 10.0 * spec.tol, "{out}");
    }

    #[test]
    fn potential_pairing() {
        let spec = QuadratureSpec::default();
        let tf = bump();
        let mu = Measure::from_atoms(vec![
            Atom::new(c(0.1, 0.0), c(2.0, 0.0)).unwrap(),
            Atom::new(c(0.0, 0.3), c(0.0, 1.0)).unwrap(),
        ]);
        let v = potential_delta_test(a(0.0), &mu, &tf, &spec).unwrap();
        let want = 2.0 * tf.phi(c(0.1, 0.0)) + c(0.0, 1.0) * tf.phi(c(0.0, 0.3));
        assert_eq!(want, pairing_target(&mu, &tf));
        assert!((v - want).norm() <= 1e-6 * want.norm().max(1.0));

        let far = Measure::from_atoms(vec![Atom::new(c(-0.8, 0.0), c(1.0, 0.0)).unwrap()]);
        assert!(potential_delta_test(a(0.0), &far, &tf, &spec).unwrap().norm() < 1e-6);
        let dense = Measure::power_density(0.0).unwrap();
        assert!(potential_delta_test(a(0.0), &dense, &tf, &spec).is_err());
    }

    #[test]
    fn mean_examples() {
        let spec = QuadratureSpec::default();
        for &r in &[0.0, 0.3, 0.9, 0.99] {
            assert!((m_alpha(a(0.0), r, &spec).unwrap() - 1.0).abs() < 1e-10);
            let v = i1(a(0.0), r, p(0.0, 0.0), &spec).unwrap();
            assert!((v - (1.0 - r * r)).abs() < 1e-14);
        }
        for &(alpha, w) in &[(0.0, 0.5), (1.0, 0.5), (3.0, 0.0)] {
            let r = 0.999;
            let v = i1(a(alpha), r, p(w, 0.0), &spec).unwrap();
            let bound = (1.0f64 - r * r).powf(alpha + 1.0) / (1.0f64 - w).powf(alpha + 2.0);
            assert!(v <= bound * (1.0 + 1e-12), "α={alpha} w={w}: {v} vs {bound}");
        }
    }

    #[test]
    fn m_alpha_matches_hypergeometric_closed_form() {
        // Σ ((−α/2)_n / n!)² r^{2n}
        let spec = QuadratureSpec::default();
        for &alpha in &[-0.5, 1.0, 3.0] {
            for &r in &[0.2, 0.7, 0.9] {
                let b = -alpha / 2.0;
                let (mut term, mut sum) = (1.0f64, 1.0f64);
                for n in 0..2000 {
                    let nf = n as f64;
                    term *= ((b + nf) / (nf + 1.0)).powi(2) * r * r;
                    sum += term;
                }
                let m = m_alpha(a(alpha), r, &spec).unwrap();
                assert!((m - sum).abs() < 1e-10 * sum, "α={alpha} r={r}: {m} vs {sum}");
            }
        }
    }

    #[test]
    fn i2_examples() {
        let spec = QuadratureSpec::default();
        let w = p(0.5, 0.0);
        assert!((i2_closed(0.3, w).unwrap() - 1.386_294_361_1).abs() < 1e-10);
        assert!((i2_closed(0.8, w).unwrap() - 0.446_287_102_6).abs() < 1e-10);
        assert_eq!(i2_closed(0.5, w).unwrap(), -(0.25f64.ln()));
        assert!(matches!(i2_closed(0.0, p(0.0, 0.0)), Err(Error::Singularity(_))));
        for &r in &[0.3, 0.8] {
            let q = i2_quad(r, p(0.3, 0.4), &spec).unwrap();
            assert!((q - i2_closed(r, p(0.3, 0.4)).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn i2_area_identity() {
        let spec = QuadratureSpec::default();
        for &w in &[0.0, 0.5, 0.9] {
            let v = i2_area(p(w, 0.0), &spec).unwrap();
            assert!((v - (1.0 - w * w)).abs() < 1e-10, "w={w}: {v}");
        }
    }

    #[test]
    fn area_examples() {
        let spec = QuadratureSpec::default();
        let (lhs, ratio) = area_bound_check(a(0.0), p(0.0, 0.0), &spec).unwrap();
        assert!((lhs - 1.0).abs() < 1e-6 && lhs == ratio);
        let (lhs, _) = area_bound_check(a(0.0), p(0.5, 0.0), &spec).unwrap();
        assert!((lhs - 0.75).abs() < 1e-6, "{lhs}");
    }

    #[test]
    fn h_estimate_examples() {
        assert!(h_estimate_check(a(0.0), 0.5).unwrap());
        assert!((h_estimate_bound(a(0.0), 0.5) - 0.5 * (1.0 + 2f64.ln())).abs() < 1e-15);
        assert!(h_estimate_check(a(0.0), 1e-9).unwrap());
        assert!(h_estimate_check(a(2.0), 0.9).unwrap());
        assert!(h_estimate_check(a(0.0), 1.0).is_err());
    }
}
