use std::path::Path;
use std::process::{Command, Output};

fn wgreen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgreen")).args(args).env("RUST_LOG", "off").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_measure(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn eval_classical() {
    let out = wgreen(&["eval", "--alpha", "0", "--z", "0.5,0", "--w", "0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["re"].as_f64().unwrap() - 1.386_294_361_1).abs() < 1e-9);
    assert_eq!(v["im"].as_f64().unwrap(), 0.0);
}

#[test]
fn eval_boundary_and_negative_coordinates() {
    let out = wgreen(&["eval", "--alpha", "1", "--z", "1,0", "--w", "0.3,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "{\"re\":0.0,\"im\":0.0}\n");
    let out = wgreen(&["eval", "--alpha", "-0.5", "--z", "-0.2,-0.1", "--w", "0.1,0"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn eval_exit_codes() {
    assert_eq!(wgreen(&["eval", "--z", "0.2,0", "--w", "0.2,0"]).status.code(), Some(3));
    assert_eq!(wgreen(&["eval", "--z", "1.5,0", "--w", "0.2,0"]).status.code(), Some(2));
    assert_eq!(wgreen(&["eval", "--alpha", "-1", "--z", "0.1,0", "--w", "0.2,0"]).status.code(), Some(2));
    assert_eq!(wgreen(&["eval", "--z", "0.1", "--w", "0.2,0"]).status.code(), Some(2));
}

#[test]
fn eval_csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let out = wgreen(&["eval", "--format", "csv", "--out", path.to_str().unwrap(), "--z", "0.5,0", "--w", "0,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "re,im\n1.3862943611198906,0\n");
}

#[test]
fn potential_examples() {
    let dir = tempfile::tempdir().unwrap();
    let dirac = write_measure(dir.path(), "d.json", r#"{"atoms":[{"re":0,"im":0,"weight_re":1,"weight_im":0}]}"#);
    let out = wgreen(&["potential", "--measure", &dirac, "--z", "0.5,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["re"].as_f64().unwrap() - 4f64.ln()).abs() < 1e-14);

    let out = wgreen(&["potential", "--alpha", "2", "--measure", &dirac, "--z", "0,1"]);
    assert_eq!(json(&out)["re"].as_f64().unwrap(), 0.0);

    let two = write_measure(
        dir.path(),
        "two.json",
        r#"{"atoms":[{"re":0,"im":0,"weight_re":2,"weight_im":0},{"re":0.5,"im":0,"weight_re":3,"weight_im":0}]}"#,
    );
    let out = wgreen(&["potential", "--measure", &two, "--z", "0.25,0"]);
    assert!((json(&out)["re"].as_f64().unwrap() - 13.061_755_255).abs() < 1e-8);
}

#[test]
fn potential_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let steep = write_measure(dir.path(), "s.json", r#"{"atoms":[],"density":{"name":"power","p":-3}}"#);
    assert_eq!(wgreen(&["potential", "--measure", &steep, "--z", "0.1,0"]).status.code(), Some(4));
    let bad = write_measure(dir.path(), "b.json", r#"{"atoms":[{"re":2,"im":0,"weight_re":1,"weight_im":0}]}"#);
    assert_eq!(wgreen(&["potential", "--measure", &bad, "--z", "0.1,0"]).status.code(), Some(2));
    let missing = dir.path().join("none.json");
    assert_eq!(wgreen(&["potential", "--measure", missing.to_str().unwrap(), "--z", "0.1,0"]).status.code(), Some(2));
}

#[test]
fn scan_dirac_matches_log() {
    let dir = tempfile::tempdir().unwrap();
    let dirac = write_measure(dir.path(), "d.json", r#"{"atoms":[{"re":0,"im":0,"weight_re":1,"weight_im":0}]}"#);
    let out = wgreen(&["scan", "--measure", &dirac, "--r-min", "0.1", "--r-max", "0.99", "--steps", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,l1_mean"));
    let mut count = 0;
    for line in lines {
        let (r, v) = line.split_once(',').unwrap();
        let (r, v): (f64, f64) = (r.parse().unwrap(), v.parse().unwrap());
        assert!((v + (r * r).ln()).abs() < 1e-8);
        count += 1;
    }
    assert_eq!(count, 12);
}

#[test]
fn scan_tail_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let mu = write_measure(
        dir.path(),
        "m.json",
        r#"{"atoms":[{"re":0.2,"im":0.1,"weight_re":1,"weight_im":-1}],"density":{"name":"power","p":0.5}}"#,
    );
    let out =
        wgreen(&["scan", "--alpha", "0.5", "--measure", &mu, "--r-min", "0.6", "--r-max", "0.999", "--steps", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let values: Vec<f64> =
        stdout(&out).lines().skip(1).map(|l| l.split_once(',').unwrap().1.parse().unwrap()).collect();
    assert!(values.windows(2).all(|p| p[1] < p[0]), "{values:?}");
}

#[test]
fn means_table() {
    let out = wgreen(&["means", "--w", "0.5,0", "--r-min", "0.2", "--r-max", "0.8", "--steps", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("r,m_alpha,i1,i2_closed,i2_quad\n"));
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((cols[1] - 1.0).abs() < 1e-10);
        assert!((cols[3] - cols[4]).abs() < 1e-8);
    }
}

#[test]
fn verify_delta_passes() {
    let out = wgreen(&["verify", "--suite", "delta"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("check_id,alpha,r,w_re,w_im,value,bound,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn verify_means_reports_mean_bound_failures() {
    // M_α exceeds 1 for α ≠ 0; every other mean check holds
    let out = wgreen(&["verify", "--suite", "means", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let rows = json(&out);
    for row in rows.as_array().unwrap() {
        let id = row["check_id"].as_str().unwrap();
        if row["pass"] == false {
            assert!(id == "m_alpha_le_1" || id == "i1_le_1", "{row}");
        }
        if id == "m0_poisson" {
            assert_eq!(row["pass"], true);
        }
    }
}

#[test]
fn verify_unknown_suite() {
    assert_eq!(wgreen(&["verify", "--suite", "everything"]).status.code(), Some(2));
}

#[test]
fn invalid_grid_override() {
    assert_eq!(wgreen(&["--ntheta", "3", "verify", "--suite", "means"]).status.code(), Some(2));
}
