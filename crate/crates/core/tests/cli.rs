use std::path::Path;
use std::process::{Command, Output};

use holderforms::cli::OUTPUT_DIR_ENV;

fn holderforms(args: &[&str], out: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_holderforms"));
    c.args(args).env_remove(OUTPUT_DIR_ENV);
    if let Some(o) = out {
        c.arg("--output-dir").arg(o);
    }
    c.output().unwrap()
}

fn text(o: &Output) -> String {
    format!(
        "{}{}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    )
}

#[test]
fn pisot_defaults_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = holderforms(&["pisot"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let s = text(&o);
    assert!(s.contains("xi  = 1.324717957"));
    assert!(s.lines().filter(|l| l.starts_with("PASS")).count() >= 3);
    let csv = std::fs::read_to_string(dir.path().join("pisot.csv")).unwrap();
    assert!(csv.starts_with("quantity,value\r\n"));
}

#[test]
fn stokes_check_on_unit_disk() {
    let dir = tempfile::tempdir().unwrap();
    let o = holderforms(&["stokes-check"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(text(&o).contains("PASS x dy on unit disk"));
}

#[test]
fn inequality_without_form_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = holderforms(&["inequality"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("`form`") && text(&o).contains("missing form spec"));
}

#[test]
fn bad_config_values_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "slack = 0.5\n").unwrap();
    let o = holderforms(&["pisot", "--config", cfg.to_str().unwrap()], Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("`slack`"));

    std::fs::write(&cfg, "[criteria]\nmatrx = [2, 1, 1, 1]\n").unwrap();
    let o = holderforms(&["criteria", "--config", cfg.to_str().unwrap()], Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("matrx"));

    let o = holderforms(&["criteria", "--theta", "1.5"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("`theta`"));
}

#[test]
fn criteria_flags_and_runtime_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = holderforms(
        &[
            "criteria",
            "--matrix",
            "0,0,1,1,0,1,0,1,0",
            "--extra-center-dims",
            "1",
            "--ell",
            "1",
        ],
        Some(dir.path()),
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let csv = std::fs::read_to_string(dir.path().join("criteria.csv")).unwrap();
    assert!(csv.contains("\r\naccessibility,"));

    let o = holderforms(&["criteria", "--matrix", "2,0,0,1"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));

    let o = holderforms(
        &["criteria", "--matrix", "3,2,1,1", "--theta", "0.25"],
        Some(dir.path()),
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let csv = std::fs::read_to_string(dir.path().join("criteria.csv")).unwrap();
    assert!(csv.starts_with("criterion,theta,value,holds,theta_threshold,threshold_reachable\r\nanosov_section,2.5"));
}

#[test]
fn output_dir_from_env_and_flag_precedence() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_holderforms"))
        .arg("pisot")
        .env(OUTPUT_DIR_ENV, env_dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env_dir.path().join("pisot.csv").exists());
    let o = Command::new(env!("CARGO_BIN_EXE_holderforms"))
        .args(["isoperimetric", "--output-dir"])
        .arg(flag_dir.path())
        .env(OUTPUT_DIR_ENV, env_dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(flag_dir.path().join("isoperimetric.csv").exists());
    assert!(!env_dir.path().join("isoperimetric.csv").exists());
}

#[test]
fn decay_with_small_form_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("d.toml");
    std::fs::write(
        &cfg,
        "[form]\nkind = \"weierstrass\"\nnx = 1025\nny = 33\n[decay]\nk_max = 6\ncalibration_j_max = 5\n",
    )
    .unwrap();
    let o = holderforms(&["decay", "--config", cfg.to_str().unwrap(), "--svg"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let csv = std::fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    assert!(csv.starts_with("k,N_k,bound_k,ratio_to_previous,predicted_rate\r\n"));
    let svg = std::fs::read_to_string(dir.path().join("decay.svg")).unwrap();
    assert!(svg.contains(r#"width="800" height="600""#));
}
