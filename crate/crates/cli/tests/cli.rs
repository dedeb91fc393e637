//! End-to-end tests of the jetcurv binary: exit codes, report integrity,
//! CSV layout, and error surfaces.

use std::path::PathBuf;
use std::process::{Command, Output};

use jetcurv_cli::report::{Report, Verdict};

fn jetcurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetcurv"))
        .args(args)
        .output()
        .expect("spawn jetcurv")
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("jetcurv-test-{}-{}", std::process::id(), name));
    p
}

#[test]
fn curvature_pass_on_fubini_study() {
    let out = tmp_path("fs.json");
    let res = jetcurv(&[
        "curvature",
        "--potential",
        "builtin:fubini_study",
        "--dim",
        "1",
        "--kappa",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let report = Report::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.summary.verdict, Verdict::Pass);
    assert!(report.summary.max_residual < 1e-8);
    assert_eq!(report.summary.points, 25); // default 5x5 grid in dimension 1
    std::fs::remove_file(out).ok();
}

#[test]
fn curvature_fails_on_euclidean_with_residual_two() {
    let out = tmp_path("eu.json");
    let res = jetcurv(&[
        "curvature",
        "--potential",
        "builtin:euclidean",
        "--dim",
        "1",
        "--kappa",
        "2",
        "--grid",
        "0:0:1", // the origin only
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(1));
    let report = Report::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.summary.verdict, Verdict::Fail);
    assert!((report.summary.max_residual - 2.0).abs() < 1e-12);
    std::fs::remove_file(out).ok();
}

#[test]
fn curvature_pass_on_hyperbolic() {
    let res = jetcurv(&[
        "curvature",
        "--potential",
        "builtin:hyperbolic",
        "--dim",
        "1",
        "--kappa",
        "-2",
    ]);
    assert!(res.status.success());
}

#[test]
fn flatness_verdicts() {
    // positive form of the model: flat
    let res = jetcurv(&["flatness", "--potential", "builtin:fubini_study", "--dim", "1"]);
    assert!(res.status.success());
    // indefinite form of the hyperbolic model: flat
    let res = jetcurv(&[
        "flatness",
        "--potential",
        "builtin:hyperbolic",
        "--dim",
        "1",
        "--form",
        "k",
    ]);
    assert!(res.status.success());
    // perturbed potential: non-flat somewhere
    let res = jetcurv(&["flatness", "--potential", "builtin:perturbed_fs", "--dim", "1"]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn claims_pass_across_builtins() {
    for pot in ["builtin:fubini_study", "builtin:hyperbolic", "builtin:euclidean"] {
        let res = jetcurv(&["claims", "--potential", pot, "--dim", "2"]);
        assert!(
            res.status.success(),
            "{pot}: {}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
}

#[test]
fn develop_csv_on_model() {
    let out = tmp_path("dev.csv");
    let res = jetcurv(&[
        "develop",
        "--potential",
        "builtin:fubini_study",
        "--dim",
        "1",
        "--grid",
        "0.1:0.3:2,0.0:0.2:2",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "re_z1,im_z1,re_w0,im_w0,re_w1,im_w1,pullback_residual"
    );
    // w is proportional to (1, z) for the model: check one row
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    let (re_z, im_z, re_w0, im_w0, re_w1, im_w1, resid) =
        (row[0], row[1], row[2], row[3], row[4], row[5], row[6]);
    assert!((re_w0 - 1.0).abs() < 1e-8 && im_w0.abs() < 1e-8);
    assert!((re_w1 - re_z).abs() < 1e-8 && (im_w1 - im_z).abs() < 1e-8);
    assert!(resid < 1e-6);
    std::fs::remove_file(out).ok();
}

#[test]
fn develop_rejects_non_flat_potential() {
    let res = jetcurv(&[
        "develop",
        "--potential",
        "builtin:perturbed_fs",
        "--dim",
        "1",
        "--grid",
        "0.2:0.3:2",
    ]);
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(
        err.contains("connection not flat"),
        "stderr was: {err}"
    );
}

#[test]
fn verify_all_passes_and_is_deterministic() {
    let out1 = tmp_path("va1.json");
    let out2 = tmp_path("va2.json");
    for out in [&out1, &out2] {
        let res = jetcurv(&[
            "verify-all",
            "--dim",
            "2",
            "--seed",
            "42",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    }
    let mut r1 = Report::from_json(&std::fs::read_to_string(&out1).unwrap()).unwrap();
    let mut r2 = Report::from_json(&std::fs::read_to_string(&out2).unwrap()).unwrap();
    // runtime and destination differ between runs; everything computed
    // must match exactly, including the semantic config hash
    r1.summary.runtime_s = 0.0;
    r2.summary.runtime_s = 0.0;
    r1.config.out = None;
    r2.config.out = None;
    assert_eq!(r1, r2);
    assert_eq!(r1.records.len(), 6);
    std::fs::remove_file(out1).ok();
    std::fs::remove_file(out2).ok();
}

#[test]
fn verify_all_empty_grid_is_config_error() {
    let res = jetcurv(&["curvature", "--grid", "0:0:0"]);
    assert_eq!(res.status.code(), Some(64));
}

#[test]
fn grid_outside_domain_is_config_error() {
    let res = jetcurv(&[
        "curvature",
        "--potential",
        "builtin:hyperbolic",
        "--dim",
        "1",
        "--grid",
        "0.9:0.95:2",
    ]);
    assert_eq!(res.status.code(), Some(64));
}

#[test]
fn unknown_flag_is_config_error() {
    let res = jetcurv(&["curvature", "--frobnicate"]);
    assert_eq!(res.status.code(), Some(64));
}

#[test]
fn spec_file_round_trip_through_cli() {
    let spec_path = tmp_path("poly.spec");
    std::fs::write(
        &spec_path,
        "kind = polynomial\nn = 1\nradius = 1.5\n\
         poly = { alpha: [1], beta: [1], c: [1, 0] }\n\
         poly = { alpha: [2], beta: [2], c: [0.05, 0] }\n",
    )
    .unwrap();
    let res = jetcurv(&[
        "claims",
        "--potential",
        spec_path.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    std::fs::remove_file(spec_path).ok();
}

#[test]
fn invalid_spec_file_is_config_error() {
    let spec_path = tmp_path("bad.spec");
    // violates the reality constraint (no conjugate mirror term)
    std::fs::write(
        &spec_path,
        "kind = polynomial\nn = 1\npoly = { alpha: [2], beta: [0], c: [1, 0] }\n",
    )
    .unwrap();
    let res = jetcurv(&["curvature", "--potential", spec_path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(64));
    std::fs::remove_file(spec_path).ok();
}

#[test]
fn thread_cap_env_is_respected() {
    let res = Command::new(env!("CARGO_BIN_EXE_jetcurv"))
        .args(["curvature", "--potential", "builtin:fubini_study", "--dim", "1"])
        .env("JETCURV_THREADS", "1")
        .output()
        .unwrap();
    assert!(res.status.success());
}

#[test]
fn exit_code_matches_summary_verdict() {
    let out = tmp_path("verdict.json");
    let res = jetcurv(&[
        "flatness",
        "--potential",
        "builtin:perturbed_fs",
        "--dim",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let report = Report::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(res.status.code(), Some(report.summary.verdict.exit_code()));
    std::fs::remove_file(out).ok();
}
