//! Quadrature on circles, the unit interval and discs inside 𝔻.
//!
//! Normalizations follow the area measure `dA = dx dy / π` and the arc
//! measure `ds = |r'(t)| dt / (2π)`, so the unit disc has area 1 and every
//! circle has mean-length 1.
//!
//! Disc integrals use a polar grid centred at a *pole*: the singular point
//! when one is given, otherwise the centre of the domain. In those
//! coordinates
//!
//! ```text
//! ∫_B f dA = (1/2π) ∫₀^{2π} ∫₀^{ρ_max(τ)} f(c + ρe^{iτ}) 2ρ dρ dτ,
//! ```
//!
//! the Jacobian `ρ` absorbs `log ρ` and `ρ^{-1}` singularities at the pole,
//! and `ρ_max(τ)` is analytic and periodic because the pole is interior. Each
//! ray is split into the polar patch `[0, inner_radius]` graded towards the
//! pole and the remainder graded towards the boundary. Angles use the
//! trapezoidal rule.
//!
//! All sums are reduced with a fixed pairwise tree over nodes collected in
//! order, so results do not depend on the number of worker threads.

use std::f64::consts::PI;
use std::ops::Add;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::DiskPoint;

/// Largest angular node count used by the adaptive circle mean and the
/// near-boundary polar rule.
pub const MAX_CIRCLE_NODES: usize = 1 << 20;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on the three-term recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, p_prev) = legendre_pair(n, x);
                dp = nf * (x * p - p_prev) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (p, p_prev) = legendre_pair(n, x);
            if p != 0.0 {
                dp = nf * (x * p - p_prev) / (x * x - 1.0);
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// `(P_n(x), P_{n-1}(x))`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (p0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Sum with a fixed binary tree; the result depends only on the order of
/// `values`.
pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().fold(T::default(), |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Breakpoints of `[a, b]` with panels halving in length towards the chosen
/// ends. Grading towards both ends splits at the midpoint first.
pub fn graded_breaks(a: f64, b: f64, toward_a: bool, toward_b: bool, levels: usize) -> Vec<f64> {
    let towards_left = |lo: f64, hi: f64| -> Vec<f64> {
        let mut pts = Vec::with_capacity(levels + 2);
        pts.push(lo);
        for k in (1..=levels).rev() {
            pts.push(lo + (hi - lo) * 0.5f64.powi(k as i32));
        }
        pts.push(hi);
        pts
    };
    let towards_right = |lo: f64, hi: f64| -> Vec<f64> {
        let mut pts = Vec::with_capacity(levels + 2);
        pts.push(lo);
        for k in 1..=levels {
            pts.push(hi - (hi - lo) * 0.5f64.powi(k as i32));
        }
        pts.push(hi);
        pts
    };
    match (toward_a, toward_b) {
        (false, false) => vec![a, b],
        (true, false) => towards_left(a, b),
        (false, true) => towards_right(a, b),
        (true, true) => {
            let mid = 0.5 * (a + b);
            let mut left = towards_left(a, mid);
            left.pop();
            left.extend(towards_right(mid, b));
            left
        }
    }
}

/// Closed ball `B(center, radius)` used as an integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Complex64,
    pub radius: f64,
}

impl Ball {
    pub fn unit_disc() -> Self {
        Self { center: Complex64::new(0.0, 0.0), radius: 1.0 }
    }

    pub fn contains_interior(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Distance from an interior point `c` to the boundary along `e^{iτ}`.
    fn exit_distance(&self, c: Complex64, dir: Complex64) -> f64 {
        let d = c - self.center;
        let b = (d * dir.conj()).re;
        let q = d.norm_sqr() - self.radius * self.radius;
        // root of ρ² + 2bρ + q = 0 with q < 0, written without cancellation
        let disc = (b * b - q).sqrt();
        if b > 0.0 {
            -q / (b + disc)
        } else {
            disc - b
        }
    }
}

/// Grid and tolerance parameters for circle, radial and disc integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Trapezoidal nodes on a circle.
    pub n_theta: usize,
    /// Radial resolution: every graded panel carries `n_r / 8` Gauss–Legendre
    /// nodes (at least 4).
    pub n_r: usize,
    pub singular_center: Option<DiskPoint>,
    /// Radius of the polar patch around the pole.
    pub inner_radius: f64,
    pub tol: f64,
    /// Number of halving levels in graded partitions.
    pub grading_levels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { n_theta: 256, n_r: 128, singular_center: None, inner_radius: 0.1, tol: 1e-6, grading_levels: 8 }
    }
}

impl QuadratureSpec {
    /// Sets the singular point and shrinks the patch to
    /// `min(0.1, ½·dist(w, 𝕋))`.
    pub fn with_singular_center(mut self, w: DiskPoint) -> Self {
        let dist = 1.0 - w.value().norm();
        self.singular_center = Some(w);
        self.inner_radius = 0.1f64.min(0.5 * dist);
        self
    }

    pub fn without_singular_center(mut self) -> Self {
        self.singular_center = None;
        self.inner_radius = 0.1;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Doubles both the angular and the radial resolution.
    pub fn refined(mut self) -> Self {
        self.n_theta *= 2;
        self.n_r *= 2;
        self
    }

    pub fn panel_order(&self) -> usize {
        (self.n_r / 8).max(4)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 8 || !self.n_theta.is_multiple_of(2) {
            return Err(Error::InvalidSpec(format!("n_theta must be even and >= 8, got {}", self.n_theta)));
        }
        if self.n_r < 4 {
            return Err(Error::InvalidSpec(format!("n_r must be >= 4, got {}", self.n_r)));
        }
        if !(self.inner_radius > 0.0 && self.inner_radius.is_finite()) {
            return Err(Error::InvalidSpec(format!("inner_radius must be positive, got {}", self.inner_radius)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidSpec(format!("tol must be positive, got {}", self.tol)));
        }
        if let Some(c) = self.singular_center {
            let dist = 1.0 - c.value().norm();
            if self.inner_radius >= dist {
                return Err(Error::InvalidSpec(format!(
                    "inner_radius {} must be smaller than the distance {dist} from the singular center to the circle",
                    self.inner_radius
                )));
            }
        }
        Ok(())
    }
}

fn finite_or_err(v: Complex64, node: usize, z: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { node, re: z.re, im: z.im })
    }
}

fn circle_samples<F>(f: &F, r: f64, n: usize, offset: usize, stride: usize) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let total = n * stride;
    (0..n)
        .into_par_iter()
        .map(|k| {
            let idx = k * stride + offset;
            let theta = 2.0 * PI * idx as f64 / total as f64;
            let z = Complex64::from_polar(r, theta);
            finite_or_err(f(z), idx, z)
        })
        .collect()
}

fn check_radius(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Domain(format!("circle radius must lie in [0,1], got {r}")))
    }
}

/// Trapezoidal mean `(1/n) Σ f(r e^{2πik/n})` with `n = spec.n_theta`.
pub fn circle_mean<F>(f: F, r: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    spec.validate()?;
    check_radius(r)?;
    let values = circle_samples(&f, r, spec.n_theta, 0, 1)?;
    Ok(pairwise_sum(&values) / spec.n_theta as f64)
}

/// Circle mean with node doubling until two successive trapezoidal sums agree
/// to `spec.tol · max(1, |mean|)`. Needed for kernels that peak sharply as
/// `r → 1`.
pub fn circle_mean_converged<F>(f: F, r: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    spec.validate()?;
    check_radius(r)?;
    let mut n = spec.n_theta;
    let mut sum = pairwise_sum(&circle_samples(&f, r, n, 0, 1)?);
    let mut mean = sum / n as f64;
    while n < MAX_CIRCLE_NODES {
        // new nodes are the odd ones of the 2n grid
        let odd = pairwise_sum(&circle_samples(&f, r, n, 1, 2)?);
        sum += odd;
        n *= 2;
        let next = sum / n as f64;
        if (next - mean).norm() <= spec.tol * next.norm().max(1.0) {
            return Ok(next);
        }
        mean = next;
    }
    Err(Error::Convergence(format!(
        "circle mean at r = {r} not converged to {} with {MAX_CIRCLE_NODES} nodes",
        spec.tol
    )))
}

fn integrate_breaks<F>(f: &F, breaks: &[f64], order: usize) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    let rule = GaussLegendre::new(order);
    let nodes: Vec<(f64, f64)> = breaks.windows(2).flat_map(|p| rule.mapped(p[0], p[1]).collect::<Vec<_>>()).collect();
    let values: Vec<f64> = nodes
        .par_iter()
        .enumerate()
        .map(|(i, &(x, w))| {
            let v = f(x);
            if v.is_finite() {
                Ok(w * v)
            } else {
                Err(Error::NonFinite { node: i, re: x, im: 0.0 })
            }
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&values))
}

/// `∫₀¹ f(r) dr` by composite Gauss–Legendre on a partition graded towards
/// both endpoints. Any weight (e.g. `2r`) is the caller's.
pub fn radial_integral<F>(f: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    radial_integral_with_breaks(f, &[], spec)
}

/// As [`radial_integral`], with extra interior breakpoints where `f` has a
/// kink (e.g. `r = |w|` for circle means of `G(·, w)`). Every subinterval is
/// graded towards both of its ends.
pub fn radial_integral_with_breaks<F>(f: F, interior: &[f64], spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    spec.validate()?;
    let mut cuts: Vec<f64> = vec![0.0];
    let mut extra: Vec<f64> = interior.iter().copied().filter(|&x| x > 0.0 && x < 1.0).collect();
    extra.sort_by(f64::total_cmp);
    extra.dedup();
    cuts.extend(extra);
    cuts.push(1.0);
    let mut breaks = vec![0.0];
    for seg in cuts.windows(2) {
        let part = graded_breaks(seg[0], seg[1], true, true, spec.grading_levels);
        breaks.extend_from_slice(&part[1..]);
    }
    integrate_breaks(&f, &breaks, spec.panel_order())
}

/// Trapezoidal node count making the polar rule accurate for a pole at
/// distance `d` from the centre of a ball of radius `radius`: `ρ_max(τ)` has
/// complex branch points at imaginary distance `asinh(√(R²−d²)/d)`.
fn polar_angle_count(d: f64, radius: f64, n_theta: usize) -> usize {
    if d <= 0.0 {
        return n_theta;
    }
    let width = ((radius * radius - d * d).max(0.0).sqrt() / d).asinh();
    // trapezoidal error ~ exp(−n·width); 30 e-folds is below double precision
    let needed = (30.0 / width).ceil();
    let needed = if needed.is_finite() { needed as usize } else { MAX_CIRCLE_NODES };
    let n = n_theta.max(needed.min(MAX_CIRCLE_NODES));
    n + n % 2
}

/// `∫_B f dA` over a ball inside the closed unit disc, with `dA = dx dy / π`.
///
/// The polar pole is `spec.singular_center` when it lies inside `ball`, and the
/// ball centre otherwise. `f` is never evaluated at the pole or on the
/// boundary of the ball.
pub fn ball_integral<F>(f: F, ball: Ball, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    spec.validate()?;
    if !(ball.radius > 0.0) || ball.center.norm() + ball.radius > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("integration ball {ball:?} is not inside the unit disc")));
    }
    let (pole, patch) = match spec.singular_center {
        Some(c) if ball.contains_interior(c.value()) => {
            let gap = ball.radius - (c.value() - ball.center).norm();
            (c.value(), spec.inner_radius.min(0.5 * gap))
        }
        _ => (ball.center, spec.inner_radius.min(0.5 * ball.radius)),
    };
    let d = (pole - ball.center).norm();
    let n_angle = polar_angle_count(d, ball.radius, spec.n_theta);
    let rule = GaussLegendre::new(spec.panel_order());
    let inner = graded_breaks(0.0, patch, true, false, spec.grading_levels);
    let per_ray = (inner.len() - 1 + 2 * (spec.grading_levels + 1)) * rule.order();

    let rays: Vec<Complex64> = (0..n_angle)
        .into_par_iter()
        .map(|j| {
            let tau = 2.0 * PI * j as f64 / n_angle as f64;
            let dir = Complex64::from_polar(1.0, tau);
            let rho_max = ball.exit_distance(pole, dir);
            let outer = graded_breaks(patch, rho_max, true, true, spec.grading_levels);
            let mut vals = Vec::with_capacity(per_ray);
            for seg in inner.windows(2).chain(outer.windows(2)) {
                for (rho, w) in rule.mapped(seg[0], seg[1]) {
                    let z = pole + dir * rho;
                    let node = j * per_ray + vals.len();
                    let v = finite_or_err(f(z), node, z)?;
                    vals.push(v * (2.0 * rho * w));
                }
            }
            Ok(pairwise_sum(&vals))
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&rays) / n_angle as f64)
}

/// `∫_𝔻 f dA` over the unit disc (normalized so that `∫_𝔻 1 dA = 1`).
///
/// With `spec.singular_center = Some(w)` the integrand may carry an
/// integrable (logarithmic or `|z−w|^{-1}`) singularity at `w`.
pub fn disc_integral<F>(f: F, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    if let Some(c) = spec.singular_center {
        if c.value().norm() >= 1.0 {
            return Err(Error::Domain("singular center must lie strictly inside the disc".into()));
        }
    }
    ball_integral(f, Ball::unit_disc(), spec)
}
