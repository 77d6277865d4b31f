#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use weighted_green::potential::{boundary_scan, green_potential, load_measure};
use weighted_green::verify::{i1, i2_closed, i2_quad, m_alpha, run_suite, Suite};
use weighted_green::{Alpha, Complex64, DiskPoint, Error, GreenKernel, QuadratureSpec};

/// Weighted Green's functions on the unit disc.
#[derive(Debug, Parser)]
#[command(name = "wgreen", version)]
struct Cli {
    /// Weight exponent, must exceed -1.
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    /// Trapezoidal nodes per circle.
    #[arg(long, global = true)]
    ntheta: Option<usize>,
    /// Radial resolution.
    #[arg(long, global = true)]
    nr: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output format; defaults to json for single values and csv for tables.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Delta,
    Means,
    Bounds,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate G_alpha(z, w).
    Eval {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        w: Complex64,
    },
    /// Evaluate the Green potential of a measure at z.
    Potential {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
    },
    /// Circle means of |potential| at evenly spaced radii.
    Scan {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        r_min: f64,
        #[arg(long, default_value_t = 0.99)]
        r_max: f64,
        /// Number of radii.
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// M_alpha, I1 and I2 circle means at evenly spaced radii.
    Means {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        w: Complex64,
        #[arg(long, default_value_t = 0.1)]
        r_min: f64,
        #[arg(long, default_value_t = 0.9)]
        r_max: f64,
        #[arg(long, default_value_t = 9)]
        steps: usize,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im but got '{s}'"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    Ok(Complex64::new(parse(re)?, parse(im)?))
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain(_) | Error::InvalidSpec(_) | Error::InvalidMeasure(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::Singularity(_) => 3,
        Error::Inadmissible(_) => 4,
        Error::Convergence(_) | Error::NonFinite { .. } => 1,
    }
}

#[derive(Serialize)]
struct ComplexOut {
    re: f64,
    im: f64,
}

fn complex_output(v: Complex64, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string(&ComplexOut { re: v.re, im: v.im }).expect("plain struct");
            s.push('\n');
            s
        }
        Format::Csv => format!("re,im\n{},{}\n", v.re, v.im),
    }
}

fn radii(r_min: f64, r_max: f64, steps: usize) -> Result<Vec<f64>, Error> {
    if steps == 0 || !(r_min <= r_max) {
        return Err(Error::Domain(format!("need steps >= 1 and r_min <= r_max, got {steps}, {r_min}, {r_max}")));
    }
    if steps == 1 {
        return Ok(vec![r_min]);
    }
    let dr = (r_max - r_min) / (steps - 1) as f64;
    Ok((0..steps).map(|k| if k + 1 == steps { r_max } else { r_min + dr * k as f64 }).collect())
}

#[derive(Serialize)]
struct MeansRow {
    r: f64,
    m_alpha: f64,
    i1: f64,
    i2_closed: f64,
    i2_quad: f64,
}

struct Run {
    body: String,
    ok: bool,
}

fn run(cli: &Cli) -> Result<Run, Error> {
    let alpha = Alpha::new(cli.alpha)?;
    let mut spec = QuadratureSpec::default();
    if let Some(n) = cli.ntheta {
        spec.n_theta = n;
    }
    if let Some(n) = cli.nr {
        spec.n_r = n;
    }
    if let Some(t) = cli.tol {
        spec.tol = t;
    }
    spec.validate()?;

    let single = cli.format.unwrap_or(Format::Json);
    let table = cli.format.unwrap_or(Format::Csv);
    let body = match &cli.command {
        Command::Eval { z, w } => {
            let kernel = GreenKernel::with_default_control(alpha)?;
            complex_output(kernel.green(DiskPoint::new(*z)?, DiskPoint::interior(*w)?)?, single)
        }
        Command::Potential { measure, z } => {
            let mu = load_measure(measure).map_err(|e| match e {
                Error::Io(io) => Error::InvalidMeasure(format!("{}: {io}", measure.display())),
                other => other,
            })?;
            complex_output(green_potential(&mu, alpha, DiskPoint::new(*z)?, &spec)?, single)
        }
        Command::Scan { measure, r_min, r_max, steps } => {
            let mu = load_measure(measure).map_err(|e| match e {
                Error::Io(io) => Error::InvalidMeasure(format!("{}: {io}", measure.display())),
                other => other,
            })?;
            let rows = boundary_scan(&mu, alpha, &radii(*r_min, *r_max, *steps)?, &spec)?;
            match table {
                Format::Csv => {
                    let mut s = String::from("r,l1_mean\n");
                    for row in &rows {
                        let _ = writeln!(s, "{},{}", row.r, row.l1_mean);
                    }
                    s
                }
                Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
            }
        }
        Command::Means { w, r_min, r_max, steps } => {
            let w = DiskPoint::interior(*w)?;
            let mut rows = Vec::new();
            for r in radii(*r_min, *r_max, *steps)? {
                let i2q = match i2_quad(r, w, &spec) {
                    Ok(v) => v,
                    Err(e) => {
                        log::warn!("I2 quadrature at r = {r}: {e}");
                        f64::NAN
                    }
                };
                rows.push(MeansRow {
                    r,
                    m_alpha: m_alpha(alpha, r, &spec)?,
                    i1: i1(alpha, r, w, &spec)?,
                    i2_closed: i2_closed(r, w)?,
                    i2_quad: i2q,
                });
            }
            match table {
                Format::Csv => {
                    let mut s = String::from("r,m_alpha,i1,i2_closed,i2_quad\n");
                    for m in &rows {
                        let _ = writeln!(s, "{},{},{},{},{}", m.r, m.m_alpha, m.i1, m.i2_closed, m.i2_quad);
                    }
                    s
                }
                Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
            }
        }
        Command::Verify { suite } => {
            let suite = match suite {
                SuiteArg::Delta => Suite::Delta,
                SuiteArg::Means => Suite::Means,
                SuiteArg::Bounds => Suite::Bounds,
                SuiteArg::All => Suite::All,
            };
            let report = run_suite(suite, &spec)?;
            for row in report.failures() {
                eprintln!("FAIL {} alpha={} value={} bound={}", row.check_id, row.alpha, row.value, row.bound);
            }
            let body = match table {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json()? + "\n",
            };
            return Ok(Run { body, ok: report.all_passed() });
        }
    };
    Ok(Run { body, ok: true })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &out.body),
                None => io::stdout().write_all(out.body.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
