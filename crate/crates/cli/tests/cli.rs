//! End-to-end checks of the command-line interface: exit-code contract,
//! JSON shape and reproducibility.

use std::process::{Command, Output};

fn twistor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_theorem_at_the_theorem_point() {
    let out = twistor(&[
        "verify-theorem",
        "--n",
        "3",
        "--nu",
        "1",
        "--t",
        "0.5",
        "--points",
        "4",
        "--samples",
        "24",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["schema"], "twistor-report/v1");
    assert_eq!(v["kind"], "verify_theorem");
    assert!((v["fit"]["a"].as_f64().unwrap() - 1.5).abs() < 1e-9);
    assert!((v["fit"]["b"].as_f64().unwrap() + 0.5).abs() < 1e-9);
    assert_eq!(v["verdict_eta_einstein"], true);
}

#[test]
fn verify_theorem_off_point_reports_counterexample() {
    let out = twistor(&[
        "verify-theorem",
        "--n",
        "3",
        "--nu",
        "1",
        "--t",
        "0.7",
        "--points",
        "2",
        "--samples",
        "16",
    ]);
    // expected verdict ("not eta-Einstein") matches, so the run passes
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["verdict_eta_einstein"], false);
    assert!(v["fit"]["residual"].as_f64().unwrap() > 1e-2);
    assert!(v["counterexample"]["label"].is_string());
}

#[test]
fn invalid_configs_exit_two() {
    assert_eq!(
        twistor(&["verify-theorem", "--n", "2", "--nu", "1", "--t", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        twistor(&["verify-theorem", "--n", "3", "--nu", "-1", "--t", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        twistor(&["verify-theorem", "--n", "3", "--nu", "1", "--t", "0"])
            .status
            .code(),
        Some(2)
    );
    // oracle step outside (1e-6, 1e-2)
    assert_eq!(
        twistor(&[
            "oracle-compare",
            "--nu",
            "1",
            "--t",
            "0.5",
            "--step",
            "0.5"
        ])
        .status
        .code(),
        Some(2)
    );
    // oracle only defined for n = 3
    assert_eq!(
        twistor(&["oracle-compare", "--n", "5", "--nu", "1", "--t", "0.5"])
            .status
            .code(),
        Some(2)
    );
    // malformed grid
    assert_eq!(
        twistor(&["scan", "--n", "3", "--nu", "1", "--t-grid", "oops"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn scan_emits_csv_and_finds_the_minimum() {
    let dir = std::env::temp_dir().join("twistor-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let csv_path = dir.join("curve.csv");
    let out = twistor(&[
        "scan",
        "--n",
        "3",
        "--nu",
        "1",
        "--t-grid",
        "0.1:1.0:10",
        "--points",
        "2",
        "--samples",
        "12",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["kind"], "scan");
    assert!((v["outcome"]["argmin_t"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("t,a,b,residual\n"));
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn oracle_compare_within_tolerance() {
    let out = twistor(&[
        "oracle-compare",
        "--nu",
        "1",
        "--t",
        "0.5",
        "--points",
        "2",
        "--samples",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["max_rel_deviation"].as_f64().unwrap() <= 1e-3);
    assert_eq!(v["within_tolerance"], true);
    // agreement is t-independent: both routes compute the same metric's Ricci
    let out = twistor(&[
        "oracle-compare",
        "--nu",
        "1",
        "--t",
        "0.2",
        "--points",
        "1",
        "--samples",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn obstructions_vanish_on_space_forms() {
    let out = twistor(&[
        "obstructions",
        "--n",
        "5",
        "--nu",
        "1",
        "--t",
        "0.5",
        "--samples",
        "4",
        "--tolerance",
        "1e-10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["max_curvature_identity_residual"].as_f64().unwrap() <= 1e-10);
    let ratio = v["samples"][0]["ratio"]["ratio"].as_f64().unwrap();
    assert!((ratio - 2.0).abs() < 1e-9);
}

#[test]
fn fiber_checks_match_closed_form() {
    let out = twistor(&["fiber-checks", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["checks"][0]["dim_rank"], 2);
    assert!(v["checks"][0]["abs_error"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn curvature_command_selects_charts_by_name() {
    let out = twistor(&[
        "curvature",
        "--chart",
        "space_form",
        "--nu",
        "1",
        "--n",
        "3",
        "--point",
        "0.1,0.2,-0.1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["kind"], "curvature");
    // space form of curvature 1: operator = Id, scalar = 6
    assert!((v["operator"][0][0].as_f64().unwrap() - 1.0).abs() < 1e-5);
    assert!((v["scalar"].as_f64().unwrap() - 6.0).abs() < 1e-4);

    assert_eq!(
        twistor(&[
            "curvature",
            "--chart",
            "nope",
            "--point",
            "0,0,0"
        ])
        .status
        .code(),
        Some(2)
    );
    // point outside the chart box
    assert_eq!(
        twistor(&[
            "curvature",
            "--chart",
            "flat",
            "--point",
            "2,0,0"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn identical_config_gives_byte_identical_reports() {
    let args = [
        "verify-theorem",
        "--n",
        "3",
        "--nu",
        "1",
        "--t",
        "0.5",
        "--seed",
        "99",
        "--points",
        "2",
        "--samples",
        "8",
    ];
    let a = twistor(&args);
    let b = twistor(&args);
    assert_eq!(a.stdout, b.stdout);
    // and a --threads override must not change the bytes either
    let c = twistor(&[
        "verify-theorem",
        "--n",
        "3",
        "--nu",
        "1",
        "--t",
        "0.5",
        "--seed",
        "99",
        "--points",
        "2",
        "--samples",
        "8",
        "--threads",
        "1",
    ]);
    assert_eq!(a.stdout, c.stdout);
    // TWISTOR_THREADS is the environment fallback for --threads
    let d = Command::new(env!("CARGO_BIN_EXE_twistor"))
        .args(args)
        .env("TWISTOR_THREADS", "2")
        .output()
        .expect("binary runs");
    assert_eq!(d.status.code(), Some(0));
    assert_eq!(a.stdout, d.stdout);
}
