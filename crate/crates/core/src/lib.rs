//! Green's function of the standard weighted Laplacian
//! `L_α = −∂̄_z (1−|z|²)^{−α} ∂_z` on the unit disc.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: the generalized logarithm `h(s) = ∫₀^s t^α/(1−t) dt` and its
//!   incomplete-beta and zero-balanced ₂F₁ forms.
//! - [`kernel`]: pointwise evaluation of `G_α(z,w) = (1−z̄w)^α h(g(z,w))`, the
//!   classical Green's function, the closed-form `∂_z G_α`, and estimate bounds.
//! - [`quadrature`]: circle means, graded radial rules and polar disc rules
//!   that absorb an interior logarithmic singularity.
//! - [`potential`]: measures, the weighted moment condition, Green potentials
//!   and boundary `L¹` scans.
//! - [`verify`]: pairings against test functions and the certification
//!   suites emitted as CSV reports.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kernel;
pub mod potential;
pub mod quadrature;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use kernel::{DiskPoint, GreenKernel};
pub use num_complex::Complex64;
pub use potential::{Atom, Density, Measure};
pub use quadrature::QuadratureSpec;
pub use specfun::{Alpha, SeriesControl};
