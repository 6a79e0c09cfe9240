//! End-to-end tests of the binary: subcommand artifacts, the determinism
//! contract, validation failures, and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_nehari-rq")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nehari-rq-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("exp.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

const BASE: &str = r#"
[problem]
family = "convex-concave"
q = 1.5
p = 2.0
gamma = 3.0

[domain]
kind = "interval"
extent = [1.0]
resolution = [41]

[solver]
seed = 0
starts = 2
max_iters = 300

[fiber]
a = 1.0
b_q = 1.0
c = 1.0
lambda = 0.2

[quotient]
kind = "lambda"
a = 1.0
b_q = 1.0
c = 1.0

[extremal]
name = "lambda-star"
"#;

#[test]
fn fiber_profile_has_the_documented_columns() {
    let dir = tmp_dir("fiber");
    let cfg = write_config(&dir, BASE);
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
        "fiber",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("out/fiber.csv")).unwrap();
    assert!(text.starts_with("t,phi,dphi,ddphi\n"));
    assert!(text.lines().count() > 100);
}

#[test]
fn quotient_json_reports_value_and_realizer() {
    let dir = tmp_dir("quotient");
    let cfg = write_config(&dir, BASE);
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
        "quotient",
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("out/quotient.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["kind"], "lambda");
    let value = v["value"].as_f64().unwrap();
    assert!((value - 0.3849001794597505).abs() < 1e-12);
    assert!((v["realizer_t"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn identical_config_and_seed_give_byte_identical_artifacts() {
    let dir = tmp_dir("determinism");
    let cfg = write_config(&dir, BASE);
    for sub in ["run1", "run2"] {
        let out = run(&[
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.join(sub).to_str().unwrap(),
            "extremal",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.join("run1/extremal.json")).unwrap();
    let b = std::fs::read(dir.join("run2/extremal.json")).unwrap();
    assert_eq!(a, b, "same config + seed must be byte-identical");

    // A different seed changes the multi-start draw.
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        dir.join("run3").to_str().unwrap(),
        "extremal",
    ]);
    assert!(out.status.success());
    let c = std::fs::read(dir.join("run3/extremal.json")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn malformed_exponent_ordering_fails_validation() {
    let dir = tmp_dir("validation");
    let cfg = write_config(
        &dir,
        r#"
[problem]
family = "convex-concave"
q = 2.5
p = 2.0
gamma = 3.0
"#,
    );
    let out = run(&["--config", cfg.to_str().unwrap(), "fiber"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("q"), "error names the offending field: {err}");
}

#[test]
fn missing_config_is_a_validation_error() {
    let out = run(&["extremal"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn no_partial_files_remain_after_runs() {
    let dir = tmp_dir("atomic");
    let cfg = write_config(&dir, BASE);
    let out_dir = dir.join("out");
    for sub in ["fiber", "quotient"] {
        let out = run(&[
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            sub,
        ]);
        assert!(out.status.success());
    }
    for entry in std::fs::read_dir(&out_dir).unwrap() {
        let name = entry.unwrap().file_name();
        let name = name.to_string_lossy();
        assert!(
            !name.contains(".tmp"),
            "staged file left behind: {name}"
        );
    }
}

#[test]
fn ground_state_artifacts_verify() {
    let dir = tmp_dir("ground");
    let cfg = write_config(
        &dir,
        &format!(
            "{BASE}\n[ground-state]\nbranch = \"plus\"\nlambda = 5.0\n"
        ),
    );
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
        "ground-state",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("out/ground_state.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["branch"], "plus");
    assert!(v["residual"].as_f64().unwrap() < 1e-6);
    assert!(v["verify"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    let csv = std::fs::read_to_string(dir.join("out/solution.csv")).unwrap();
    assert!(csv.starts_with("index,x,value\n"));
}

#[test]
fn branch_csv_keeps_the_frozen_column_contract() {
    let dir = tmp_dir("branch");
    let cfg = write_config(
        &dir,
        &format!("{BASE}\n[branch]\nlambda_min = 4.0\nlambda_max = 8.0\ncount = 3\n"),
    );
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
        "branch",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("out/branch.csv")).unwrap();
    assert!(text.starts_with("lambda,mu,energy,norm_gamma,residual,admissible,phi2\n"));
}

#[test]
fn check_family_suites_pass() {
    let dir = tmp_dir("check");
    for family in ["convex-concave", "four-term"] {
        let out = run(&[
            "--out",
            dir.join(family).to_str().unwrap(),
            "check",
            "--family",
            family,
        ]);
        assert!(
            out.status.success(),
            "family {family}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
    let out = run(&["check", "--family", "unknown"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn grid_refine_scales_the_resolution() {
    let dir = tmp_dir("refine");
    let cfg = write_config(&dir, BASE);
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
        "--grid-refine",
        "1",
        "extremal",
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("out/extremal.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    // 41 nodes refine to 81 (cells double).
    assert_eq!(v["grid"][0], 81);
}
