//! Measures on the disc and their Green potentials
//! `G_α^μ(z) = ∫_𝔻 G_α(z,w) dμ(w)`.
//!
//! A [`Measure`] is a finite list of complex point masses plus at most one
//! radial density `(1−|w|²)^p dA(w)`. It is admissible for `α` when the
//! weighted moment `∫(1−|w|²)^{α+1} d|μ|` is finite.

use std::fs;
use std::path::Path;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{DiskPoint, GreenKernel};
use crate::quadrature::{circle_mean, disc_integral, QuadratureSpec};
use crate::specfun::{Alpha, SeriesControl};

/// Scan radii within this distance of an atom's modulus are shifted by
/// [`SCAN_NUDGE`].
const SCAN_COLLISION: f64 = 1e-12;
const SCAN_NUDGE: f64 = 1e-9;

/// Point mass `weight · δ_location`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    location: DiskPoint,
    pub weight: Complex64,
}

impl Atom {
    pub fn new(location: Complex64, weight: Complex64) -> Result<Self> {
        let location = DiskPoint::interior(location)
            .map_err(|_| Error::InvalidMeasure(format!("atom location {location} must satisfy |w| < 1")))?;
        if !(weight.re.is_finite() && weight.im.is_finite()) {
            return Err(Error::InvalidMeasure(format!("atom weight {weight} is not finite")));
        }
        Ok(Self { location, weight })
    }

    pub fn location(&self) -> DiskPoint {
        self.location
    }
}

/// Radial density families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Density {
    /// `dμ = (1−|w|²)^p dA(w)`.
    Power { p: f64 },
}

impl Density {
    fn weight(&self, w: DiskPoint) -> f64 {
        match *self {
            Density::Power { p } => w.one_minus_abs2().powf(p),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Measure {
    pub atoms: Vec<Atom>,
    pub density: Option<Density>,
}

#[derive(Serialize, Deserialize)]
struct AtomRecord {
    re: f64,
    im: f64,
    weight_re: f64,
    weight_im: f64,
}

#[derive(Serialize, Deserialize)]
struct MeasureRecord {
    #[serde(default)]
    atoms: Vec<AtomRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    density: Option<Density>,
}

impl Measure {
    pub fn from_atoms(atoms: Vec<Atom>) -> Self {
        Self { atoms, density: None }
    }

    pub fn dirac(location: Complex64) -> Result<Self> {
        Ok(Self::from_atoms(vec![Atom::new(location, Complex64::new(1.0, 0.0))?]))
    }

    pub fn power_density(p: f64) -> Result<Self> {
        let m = Self { atoms: Vec::new(), density: Some(Density::Power { p }) };
        m.validate()?;
        Ok(m)
    }

    pub fn with_density(mut self, density: Density) -> Self {
        self.density = Some(density);
        self
    }

    pub fn is_atomic(&self) -> bool {
        self.density.is_none()
    }

    fn validate(&self) -> Result<()> {
        if let Some(Density::Power { p }) = self.density {
            if !p.is_finite() {
                return Err(Error::InvalidMeasure(format!("density exponent {p} is not finite")));
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let rec: MeasureRecord =
            serde_json::from_str(s).map_err(|e| Error::InvalidMeasure(format!("malformed measure JSON: {e}")))?;
        let atoms = rec
            .atoms
            .into_iter()
            .map(|a| Atom::new(Complex64::new(a.re, a.im), Complex64::new(a.weight_re, a.weight_im)))
            .collect::<Result<Vec<_>>>()?;
        let m = Self { atoms, density: rec.density };
        m.validate()?;
        Ok(m)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let rec = MeasureRecord {
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomRecord {
                    re: a.location.value().re,
                    im: a.location.value().im,
                    weight_re: a.weight.re,
                    weight_im: a.weight.im,
                })
                .collect(),
            density: self.density,
        };
        Ok(serde_json::to_string(&rec)?)
    }
}

pub fn load_measure(path: impl AsRef<Path>) -> Result<Measure> {
    Measure::from_json_str(&fs::read_to_string(path)?)
}

pub fn save_measure(mu: &Measure, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, mu.to_json_string()?)?;
    Ok(())
}

/// Weighted moment `∫(1−|w|²)^{α+1} d|μ|(w)`; errors if it diverges.
pub fn moment_check(mu: &Measure, alpha: Alpha) -> Result<f64> {
    let a1 = alpha.value() + 1.0;
    let atoms: f64 = mu.atoms.iter().map(|at| at.weight.norm() * at.location.one_minus_abs2().powf(a1)).sum();
    let density = match mu.density {
        None => 0.0,
        Some(Density::Power { p }) => {
            let e = a1 + p;
            if e <= -1.0 {
                return Err(Error::Inadmissible(format!(
                    "density (1-|w|^2)^{p} has divergent moment for alpha = {} (exponent {e} <= -1)",
                    alpha.value()
                )));
            }
            // ∫_𝔻 (1−|w|²)^e dA(w) = ∫₀¹ u^e du
            1.0 / (e + 1.0)
        }
    };
    Ok(atoms + density)
}

/// Atom contribution `Σ weight · G_α(z, location)`.
fn atom_part(kernel: &GreenKernel, mu: &Measure, z: DiskPoint) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for at in &mu.atoms {
        acc += at.weight * kernel.green(z, at.location)?;
    }
    Ok(acc)
}

/// Density contribution `∫ G_α(z,w) (1−|w|²)^p dA(w)`, integrated on a polar
/// grid centred at the logarithmic singularity `w = z`.
fn density_part(kernel: &GreenKernel, density: &Density, z: DiskPoint, spec: &QuadratureSpec) -> Result<Complex64> {
    if z.is_boundary() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let local = spec.with_singular_center(z);
    let first_err = std::sync::Mutex::new(None);
    let v = disc_integral(
        |wv| {
            // nodes are strictly interior and never at the pole
            let w = DiskPoint::new(wv).expect("quadrature node inside the disc");
            match kernel.green(z, w) {
                // G vanishes on 𝕋 faster than any admissible density blows up
                Ok(g) if g == Complex64::new(0.0, 0.0) => g,
                Ok(g) => g * density.weight(w),
                Err(e) => {
                    first_err.lock().unwrap().get_or_insert(e);
                    Complex64::new(f64::NAN, 0.0)
                }
            }
        },
        &local,
    );
    if let Some(e) = first_err.into_inner().unwrap() {
        return Err(e);
    }
    v
}

/// Green potential `G_α^μ(z)`.
pub fn green_potential(mu: &Measure, alpha: Alpha, z: DiskPoint, spec: &QuadratureSpec) -> Result<Complex64> {
    moment_check(mu, alpha)?;
    let kernel = GreenKernel::new(alpha, SeriesControl::default())?;
    potential_with_kernel(&kernel, mu, z, spec)
}

fn potential_with_kernel(kernel: &GreenKernel, mu: &Measure, z: DiskPoint, spec: &QuadratureSpec) -> Result<Complex64> {
    let mut v = atom_part(kernel, mu, z)?;
    if let Some(d) = &mu.density {
        v += density_part(kernel, d, z, spec)?;
    }
    Ok(v)
}

/// One row of a boundary scan: the radius actually used and the mean of
/// `|G_α^μ|` over that circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub r: f64,
    pub l1_mean: f64,
}

/// Radial `L¹(𝕋)` means `∫|G_α^μ(re^{iθ})| dθ/2π` at each radius.
///
/// The density part of the potential is rotation invariant, so it is
/// integrated once per radius; atoms are summed at every circle node. Radii
/// that pass through an atom are nudged by `1e-9`.
pub fn boundary_scan(mu: &Measure, alpha: Alpha, radii: &[f64], spec: &QuadratureSpec) -> Result<Vec<ScanRow>> {
    if radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::Domain("scan radii must lie in (0,1)".into()));
    }
    if radii.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::Domain("scan radii must be strictly increasing".into()));
    }
    moment_check(mu, alpha)?;
    let kernel = GreenKernel::new(alpha, SeriesControl::default())?;
    let spec = spec.without_singular_center();

    radii
        .par_iter()
        .map(|&r0| {
            let r = nudge_radius(mu, r0);
            let radial = match &mu.density {
                Some(d) => density_part(&kernel, d, DiskPoint::from_polar(r, 0.0)?, &spec)?,
                None => Complex64::new(0.0, 0.0),
            };
            let first_err = std::sync::Mutex::new(None);
            let mean = circle_mean(
                |z| {
                    let zp = DiskPoint::new(z).expect("scan node inside the disc");
                    match atom_part(&kernel, mu, zp) {
                        Ok(v) => Complex64::new((v + radial).norm(), 0.0),
                        Err(e) => {
                            first_err.lock().unwrap().get_or_insert(e);
                            Complex64::new(f64::NAN, 0.0)
                        }
                    }
                },
                r,
                &spec,
            );
            if let Some(e) = first_err.into_inner().unwrap() {
                return Err(e);
            }
            Ok(ScanRow { r, l1_mean: mean?.re })
        })
        .collect()
}

fn nudge_radius(mu: &Measure, r: f64) -> f64 {
    let hit = mu.atoms.iter().any(|a| (a.location.value().norm() - r).abs() <= SCAN_COLLISION);
    if !hit {
        return r;
    }
    let moved = if r + SCAN_NUDGE < 1.0 { r + SCAN_NUDGE } else { r - SCAN_NUDGE };
    warn!("scan radius {r} passes through an atom; using {moved}");
    moved
}
