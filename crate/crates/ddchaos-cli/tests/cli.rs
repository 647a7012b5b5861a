//! End-to-end tests driving the compiled binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ddchaos"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success for {args:?}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

fn run_raw(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

const MINI_FAIL: &str = r#"{
    "schema": "ddchaos-scenario/1",
    "name": "mini-fail",
    "space": {"kind": "banach", "family": {"type": "spectral_l1"}},
    "families": [
        {"label": "drift", "kind": {"type": "spectral_first_order", "poly": [0.0, 1.0]}}
    ],
    "vectors": {
        "down": {"make": "modes", "modes": [{"mu": -1.0, "c": 1.0}]}
    },
    "checks": [
        {"type": "decay", "name": "too_tight", "family": "drift", "vector": "down",
         "times": [1.0, 2.0], "final_below": 1e-30}
    ]
}"#;

#[test]
fn ml_eval_prints_e_for_the_exponential_case() {
    let out = run_ok(&["ml-eval", "1.0", "1.0"]);
    assert_eq!(out.trim(), "2.718281828459045");
}

#[test]
fn ml_eval_on_the_negative_axis_matches_the_reference() {
    // E_{3/2} at -50; reference from a 60-digit series evaluation.
    let out = run_ok(&["ml-eval", "1.5", "-50"]);
    let got: f64 = out.trim().parse().expect("real-valued output");
    let reference = -0.004578385105839278;
    let rel = ((got - reference) / reference).abs();
    assert!(rel < 1e-4, "value {got} is {rel} away from {reference}");
}

#[test]
fn ml_eval_prints_complex_output_for_complex_input() {
    let out = run_ok(&["ml-eval", "1.0", "2i"]);
    // e^{2i} = cos 2 + i sin 2
    let parsed = out.trim();
    assert!(parsed.contains('i'), "expected a complex literal, got {parsed}");
    assert!(parsed.starts_with("-0.41"), "cos 2 leads: {parsed}");
}

#[test]
fn list_names_every_bundled_scenario() {
    let out = run_ok(&["list"]);
    for name in [
        "polinomi-AB",
        "cosine-matrix-block",
        "un-fractional",
        "blocks-single",
        "blocks-disjoint-2speed",
        "sjajno-product",
        "enenminusjedan-weight",
    ] {
        assert!(
            out.lines().any(|l| l.starts_with(&format!("{name}:"))),
            "{name} missing from list output:\n{out}"
        );
    }
}

#[test]
fn run_writes_a_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let stdout = run_ok(&[
        "run",
        "--scenario",
        "polinomi-AB",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(stdout.contains("status ok"), "{stdout}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["schema"], "ddchaos-report/1");
    assert_eq!(report["all_ok"], true);
    let summary = std::fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    assert!(summary.ends_with("status ok\n"));
}

#[test]
fn reruns_reproduce_the_outputs_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out_dir in [&a, &b] {
        run_ok(&[
            "run",
            "--scenario",
            "polinomi-AB",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
    }
    let names = |p: &Path| {
        let mut v: Vec<String> = std::fs::read_dir(p)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n != "run_meta.json")
            .collect();
        v.sort();
        v
    };
    let files = names(&a);
    assert_eq!(files, names(&b));
    assert!(files.contains(&"report.json".to_string()));
    for name in files {
        let x = std::fs::read(a.join(&name)).unwrap();
        let y = std::fs::read(b.join(&name)).unwrap();
        assert_eq!(x, y, "{name} differs between identical runs");
    }
}

#[test]
fn density_estimates_a_trace_csv() {
    let dir = tempfile::tempdir().unwrap();
    let all_in = dir.path().join("ones.csv");
    std::fs::write(&all_in, "t,value\n1,1\n2,1\n3,1\n4,1\n").unwrap();
    let out = run_ok(&["density", "--csv", all_in.to_str().unwrap()]);
    assert_eq!(out.trim(), "1");

    let mixed = dir.path().join("mixed.csv");
    std::fs::write(&mixed, "1,1\n2,0\n3,1\n4,1\n").unwrap();
    let out = run_ok(&["density", "--csv", mixed.to_str().unwrap()]);
    let v: f64 = out.trim().parse().expect("numeric density");
    assert!((0.0..=1.0).contains(&v), "density {v} out of range");
}

#[test]
fn orbit_prints_the_halving_ratio_at_log_two() {
    let out = run_ok(&[
        "orbit",
        "--scenario",
        "polinomi-AB",
        "--family",
        "first",
        "--vector",
        "minus_one",
        "--times",
        "0,0.6931471805599453",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,value");
    assert_eq!(lines[1], "0,1");
    assert_eq!(lines[2], "0.6931471805599453,0.5");
}

#[test]
fn verify_identities_skips_detection() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("vi");
    // blocks-single is detection-only; with detection stripped the run has
    // nothing to do but still succeeds vacuously.
    let stdout = run_ok(&[
        "verify-identities",
        "--scenario",
        "blocks-single",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(stdout.contains("status ok"), "{stdout}");
    assert!(!stdout.contains("verdict"), "{stdout}");
}

#[test]
fn detect_requires_a_detection_section() {
    let out = run_raw(&["detect", "--scenario", "polinomi-AB", "--out", "/tmp/unused-ddchaos"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("no detection section"), "{stderr}");
}

#[test]
fn failing_check_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mini.json");
    std::fs::write(&cfg, MINI_FAIL).unwrap();
    let out = run_raw(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("too_tight [decay] FAIL"), "{stdout}");
    assert!(stdout.contains("status failed"), "{stdout}");
}

#[test]
fn malformed_config_exits_one_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("broken.json");
    std::fs::write(&cfg, MINI_FAIL.replace("\"mu\": -1.0", "\"mu\": \"west\"")).unwrap();
    let out = run_raw(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("mu"), "{stderr}");
}

#[test]
fn unknown_bundled_name_exits_one() {
    let out = run_raw(&["run", "--scenario", "no-such-thing", "--out", "/tmp/unused-ddchaos"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("no bundled scenario"), "{stderr}");
}

#[test]
fn bad_flag_exits_one() {
    let out = run_raw(&["run", "--nonsense"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = run_raw(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
