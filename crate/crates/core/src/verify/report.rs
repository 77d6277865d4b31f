use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::*;
use crate::potential::{boundary_scan, Atom, Density};

const REPORT_SEED: u64 = 0x0067_7265_656e;

/// Parameters shared by the suites.
const SUITE_ALPHAS: [f64; 5] = [-0.5, 0.0, 0.5, 1.0, 2.0];
const MEAN_ALPHAS: [f64; 4] = [-0.5, 0.0, 1.0, 3.0];
const MEAN_RADII: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99];
const DELTA_TOL: f64 = 1e-3;
const MEAN_BOUND: f64 = 1.0 + 1e-8;
const POISSON_TOL: f64 = 1e-10;
const QUAD_TOL: f64 = 1e-8;
const BAND: f64 = 10.0;
const DECAY: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Delta,
    Means,
    Bounds,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta" => Ok(Suite::Delta),
            "means" => Ok(Suite::Means),
            "bounds" => Ok(Suite::Bounds),
            "all" => Ok(Suite::All),
            _ => Err(Error::Domain(format!("unknown suite '{s}' (expected delta, means, bounds or all)"))),
        }
    }
}

/// One line of a verification report. `pass` means `value ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub check_id: String,
    pub alpha: f64,
    pub r: Option<f64>,
    pub w_re: Option<f64>,
    pub w_im: Option<f64>,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(check_id: &str, alpha: f64, r: Option<f64>, w: Option<Complex64>, value: f64, bound: f64) -> Self {
        Self {
            check_id: check_id.to_string(),
            alpha,
            r,
            w_re: w.map(|w| w.re),
            w_im: w.map(|w| w.im),
            value,
            bound,
            // NaN never passes
            pass: value <= bound,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub rows: Vec<CheckRow>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check_id,alpha,r,w_re,w_im,value,bound,pass\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                row.check_id,
                row.alpha,
                opt(row.r),
                opt(row.w_re),
                opt(row.w_im),
                row.value,
                row.bound,
                row.pass
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.rows)?)
    }

    fn push(&mut self, row: CheckRow) {
        log::debug!("{} α={} value={} bound={}", row.check_id, row.alpha, row.value, row.bound);
        self.rows.push(row);
    }
}

fn alpha(v: f64) -> Alpha {
    Alpha::new(v).expect("suite alphas exceed -1")
}

fn point(z: Complex64) -> DiskPoint {
    DiskPoint::new(z).expect("suite points lie in the disc")
}

/// Runs a suite of checks. Quadrature sizes come from `spec`; the pairing
/// checks use it refined once. Row order and values are independent of the
/// number of worker threads.
pub fn run_suite(suite: Suite, spec: &QuadratureSpec) -> Result<Report> {
    spec.validate()?;
    let mut report = Report::default();
    if matches!(suite, Suite::Delta | Suite::All) {
        delta_suite(spec, &mut report)?;
    }
    if matches!(suite, Suite::Means | Suite::All) {
        means_suite(spec, &mut report)?;
    }
    if matches!(suite, Suite::Bounds | Suite::All) {
        bounds_suite(spec, &mut report)?;
    }
    Ok(report)
}

fn suite_bump() -> TestFunction {
    TestFunction::new(Complex64::new(0.0, 0.0), 0.5, 4, Complex64::new(1.0, 0.0)).expect("valid bump")
}

fn delta_suite(spec: &QuadratureSpec, report: &mut Report) -> Result<()> {
    let fine = spec.refined();
    let tf = suite_bump();
    let ws = [Complex64::new(0.0, 0.0), Complex64::new(0.2, 0.0), Complex64::new(0.35, 0.1)];
    for &a in &SUITE_ALPHAS {
        for &w in &ws {
            let v = delta_test(alpha(a), point(w), &tf, &fine)?;
            let target = tf.phi(w);
            let bound = DELTA_TOL * target.norm().max(1.0);
            report.push(CheckRow::new("delta", a, None, Some(w), (v - target).norm(), bound));
        }
        let outside = Complex64::new(0.7, 0.1);
        let v = delta_test(alpha(a), point(outside), &tf, &fine)?;
        report.push(CheckRow::new("delta_outside", a, None, Some(outside), v.norm(), 10.0 * spec.tol));
    }
    let mu = Measure::from_atoms(vec![
        Atom::new(Complex64::new(0.1, 0.0), Complex64::new(2.0, 0.0))?,
        Atom::new(Complex64::new(0.0, 0.3), Complex64::new(0.0, 1.0))?,
    ]);
    let target = pairing_target(&mu, &tf);
    for &a in &SUITE_ALPHAS {
        let v = potential_delta_test(alpha(a), &mu, &tf, &fine)?;
        let bound = DELTA_TOL * target.norm().max(1.0);
        report.push(CheckRow::new("potential_delta", a, None, None, (v - target).norm(), bound));
    }
    Ok(())
}

fn means_suite(spec: &QuadratureSpec, report: &mut Report) -> Result<()> {
    let i1_ws = [0.0, 0.5, 0.9].map(|x| Complex64::new(x, 0.0));
    for &a in &MEAN_ALPHAS {
        for &r in &MEAN_RADII {
            let m = m_alpha(alpha(a), r, spec)?;
            report.push(CheckRow::new("m_alpha_le_1", a, Some(r), None, m, MEAN_BOUND));
            if a == 0.0 {
                report.push(CheckRow::new("m0_poisson", a, Some(r), None, (m - 1.0).abs(), POISSON_TOL));
            }
            for &w in &i1_ws {
                let v = i1(alpha(a), r, point(w), spec)?;
                report.push(CheckRow::new("i1_le_1", a, Some(r), Some(w), v, MEAN_BOUND));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(REPORT_SEED);
    let mut n = 0;
    while n < 50 {
        let r: f64 = rng.gen_range(0.01..0.99);
        let w = Complex64::from_polar(rng.gen_range(0.01..0.99), rng.gen_range(0.0..std::f64::consts::TAU));
        // keep the circle away from the logarithmic pole
        if (r - w.norm()).abs() < 0.05 {
            continue;
        }
        let q = i2_quad(r, point(w), spec)?;
        let e = i2_closed(r, point(w))?;
        report.push(CheckRow::new("i2_quad_vs_closed", 0.0, Some(r), Some(w), (q - e).abs(), QUAD_TOL));
        n += 1;
    }
    for &w in &[0.0, 0.5, 0.9] {
        let wz = Complex64::new(w, 0.0);
        let v = i2_area(point(wz), spec)?;
        report.push(CheckRow::new("i2_area", 0.0, None, Some(wz), (v - (1.0 - w * w)).abs(), QUAD_TOL));
    }

    // pointwise limits as r → 1
    for &w in &[0.0, 0.5] {
        let wz = Complex64::new(w, 0.0);
        for &a in &[0.0, 1.0, 3.0] {
            let ratio = i1(alpha(a), 0.999, point(wz), spec)? / i1(alpha(a), 0.5, point(wz), spec)?;
            report.push(CheckRow::new("i1_limit", a, Some(0.999), Some(wz), ratio, DECAY));
        }
        let ratio = i2_closed(0.999, point(wz))? / i2_closed(0.5, point(wz))?;
        report.push(CheckRow::new("i2_limit", 0.0, Some(0.999), Some(wz), ratio, DECAY));
    }
    Ok(())
}

fn bounds_suite(spec: &QuadratureSpec, report: &mut Report) -> Result<()> {
    let area_ws = [0.0, 0.5, 0.9, 0.99].map(|x| Complex64::new(x, 0.0));
    for &a in &SUITE_ALPHAS {
        let ratios = area_ws
            .iter()
            .map(|&w| area_bound_check(alpha(a), point(w), spec).map(|(_, ratio)| ratio))
            .collect::<Result<Vec<_>>>()?;
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        for (&w, &ratio) in area_ws.iter().zip(&ratios) {
            let value = if ratio.is_finite() { ratio / lo } else { f64::NAN };
            report.push(CheckRow::new("area_ratio_band", a, None, Some(w), value, BAND));
        }
        if a == 0.0 {
            let (lhs, _) = area_bound_check(alpha(0.0), point(Complex64::new(0.0, 0.0)), spec)?;
            report.push(CheckRow::new(
                "area_exact",
                0.0,
                None,
                Some(Complex64::new(0.0, 0.0)),
                (lhs - 1.0).abs(),
                1e-6,
            ));
        }
    }

    // circle means of |G_α| against the two-term bracket, relative to the
    // ratio at (r, w) = (0.3, 0)
    let kernel_radii = [0.3, 0.6, 0.9, 0.99, 0.999];
    for &a in &SUITE_ALPHAS {
        let kernel = GreenKernel::with_default_control(alpha(a))?;
        let mut ratios = Vec::new();
        for &w in &[0.0, 0.5, 0.8] {
            let wp = point(Complex64::new(w, 0.0));
            let ow = wp.one_minus_abs2();
            for &r in &kernel_radii {
                let mean = circle_mean_converged(
                    |z| {
                        let z = DiskPoint::new(z).expect("circle inside the disc");
                        Complex64::new(kernel.green(z, wp).map(|g| g.norm()).unwrap_or(f64::NAN), 0.0)
                    },
                    r,
                    &spec.without_singular_center().with_tol(1e-10),
                )?
                .re;
                let bracket = ow.powf(a + 1.0) * i1(alpha(a), r, wp, spec)? + ow.powf(a) * i2_closed(r, wp)?;
                ratios.push((r, w, mean / bracket));
            }
        }
        // one-sided estimate: the ratio may shrink but must not grow
        let reference = ratios[0].2;
        for (r, w, ratio) in ratios {
            let value = if ratio.is_finite() { ratio / reference } else { f64::NAN };
            report.push(CheckRow::new("mean_bracket_sup", a, Some(r), Some(Complex64::new(w, 0.0)), value, BAND));
        }
    }

    // (−log t)/(1−t) is decreasing on (0,1)
    let ts: Vec<f64> = (1..1000).map(|k| k as f64 / 1000.0).collect();
    let f = |t: f64| -t.ln() / (1.0 - t);
    let worst = ts.windows(2).map(|p| f(p[1]) - f(p[0])).fold(f64::NEG_INFINITY, f64::max);
    report.push(CheckRow::new("log_majorant_decreasing", 0.0, None, None, worst, 0.0));

    let h_alphas = [-0.9, -0.5, 0.0, 1.0, 5.0];
    let h_points = [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999];
    for &a in &h_alphas {
        for &s in &h_points {
            let lhs = h(alpha(a), s, &SeriesControl::default())?;
            report.push(CheckRow::new("h_estimate", a, Some(s), None, lhs, h_estimate_bound(alpha(a), s)));
        }
    }

    for &a in &SUITE_ALPHAS {
        for (name, mu) in decay_measures(a)? {
            let rows = boundary_scan(&mu, alpha(a), &[0.5, 0.999], spec)?;
            let ratio = rows[1].l1_mean / rows[0].l1_mean;
            report.push(CheckRow::new(name, a, Some(rows[1].r), None, ratio, DECAY));
        }
    }
    Ok(())
}

fn decay_measures(a: f64) -> Result<Vec<(&'static str, Measure)>> {
    Ok(vec![
        ("decay_single_atom", Measure::dirac(Complex64::new(0.3, -0.2))?),
        (
            "decay_two_atoms",
            Measure::from_atoms(vec![
                Atom::new(Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0))?,
                Atom::new(Complex64::new(0.5, 0.0), Complex64::new(3.0, 0.0))?,
            ]),
        ),
        ("decay_power_density", Measure::default().with_density(Density::Power { p: 0.0 })),
        ("decay_near_critical_density", Measure::default().with_density(Density::Power { p: -a - 0.5 })),
    ])
}
