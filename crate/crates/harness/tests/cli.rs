use std::path::Path;
use std::process::Command;

use microsob_harness::config::ExperimentConfig;
use microsob_harness::report::VerificationReport;
use microsob_harness::run::{run, REPORT_FILE};

fn microsob(out: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_microsob"))
        .env_remove("MICROSOB_OUT")
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn config_without_operations_gives_an_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("empty.json");
    std::fs::write(&cfg_path, "{}").unwrap();
    let out = dir.path().join("out");
    let res = microsob(&out, &["--config", cfg_path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0));
    let text = std::fs::read_to_string(out.join(REPORT_FILE)).unwrap();
    assert!(VerificationReport::from_json(&text).unwrap().is_empty());
}

#[test]
fn expected_rejection_passes_and_unexpected_one_fails() {
    let dir = tempfile::tempdir().unwrap();
    let ok = microsob(
        dir.path(),
        &[
            "--grid-size",
            "512",
            "multiply",
            "delta",
            "heaviside",
            "--hypotheses",
            "1,1,4,4",
            "--expect-error",
            "TransversalityViolated",
        ],
    );
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    let bad = microsob(
        dir.path(),
        &[
            "--grid-size",
            "512",
            "multiply",
            "delta",
            "heaviside",
            "--hypotheses",
            "1,1,4,4",
        ],
    );
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.json");
    std::fs::write(
        &cfg_path,
        r#"{"operations": [{"op": "analyze", "member": "cantor"}]}"#,
    )
    .unwrap();
    let res = microsob(dir.path(), &["--config", cfg_path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let res = microsob(dir.path(), &["verify-suite", "--name", "nope"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn analyze_writes_plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let res = microsob(dir.path(), &["--grid-size", "1024", "analyze", "heaviside"]);
    assert_eq!(
        res.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&res.stdout)
    );
    for f in [
        "00-heaviside-orders.csv",
        "00-heaviside-profile.csv",
        "00-heaviside-wavefront.csv",
        REPORT_FILE,
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn runs_are_deterministic_up_to_timings() {
    let text = r#"{
        "grid": {"dim": 1, "size": 1024},
        "hypotheses": {"h": {"r_prime": 2, "r_double_prime": 2, "r1": 4, "r2": 4, "m": 1}},
        "operations": [
            {"op": "analyze", "member": "delta"},
            {"op": "tensor", "first": "delta", "second": "heaviside"},
            {"op": "multiply", "first": "gaussian", "second": "heaviside", "hypotheses": "h"},
            {"op": "verify_suite", "name": "gate-soundness"}
        ]
    }"#;
    let cfg = ExperimentConfig::from_json(text).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run(&cfg, a.path()).unwrap();
    let second = run(&cfg, b.path()).unwrap();
    assert_eq!(first.exit_code(), 0, "{first:?}");
    assert_eq!(
        first.report.without_timings().to_json().unwrap(),
        second.report.without_timings().to_json().unwrap()
    );
    for name in ["00-delta-orders.csv", "02-gaussianxheaviside-orders.csv"] {
        let read = |d: &Path| std::fs::read(d.join(name)).unwrap();
        assert_eq!(read(a.path()), read(b.path()), "{name}");
    }
}
