use std::process::Command;

use complex_ou::check::anchor;
use complex_ou::fields::read_csv;
use complex_ou::harness::cli::{run_with, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};
use complex_ou::harness::{run_selected, Config, Selection};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("complex-ou").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn certify_identity_passes() {
    let (code, out, _) = run(&["certify", "--config", "identity-2d.json"]);
    assert_eq!(code, EXIT_PASS, "{out}");
    assert!(out.contains("gamma_A=1.000000"), "{out}");
    assert!(out.contains("overall: PASS"));
}

#[test]
fn a4_violator_stops_after_certification() {
    let (code, out, _) = run(&["suite", "--config", "a4-violator", "--format", "json"]);
    assert_eq!(code, EXIT_FAIL);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["overall"], "fail");
    assert_eq!(report["truncated_at"], "certify_gamma");
    assert!(report["certificate"]["gamma_a"].as_f64().unwrap() < 0.0);
}

#[test]
fn report_matches_schema_keys() {
    let schema: serde_json::Value = serde_json::from_str(include_str!("../docs/report-schema.json")).unwrap();
    let (_, out, _) = run(&["certify", "--format", "json"]);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in schema["required"].as_array().unwrap() {
        assert!(report.get(key.as_str().unwrap()).is_some(), "missing {key}");
    }
    for rec in report["records"].as_array().unwrap() {
        for key in schema["$defs"]["record"]["required"].as_array().unwrap() {
            assert!(rec.get(key.as_str().unwrap()).is_some(), "record missing {key}");
        }
        assert!(anchor::ALL.contains(&rec["anchor"].as_str().unwrap()));
    }
}

#[test]
fn dump_writes_readable_csv() {
    let dir = tempfile::tempdir().unwrap();
    for what in ["kernel", "sample", "semigroup"] {
        let path = dir.path().join(format!("{what}.csv"));
        let (code, _, err) = run(&["dump", "--what", what, "--grid", "32,6", "--out", path.to_str().unwrap()]);
        assert_eq!(code, EXIT_PASS, "{err}");
        let field = read_csv(std::fs::File::open(&path).unwrap()).unwrap();
        assert_eq!(field.spec.n, 32);
        let expected = if what == "kernel" { 4 } else { 2 };
        assert_eq!(field.components, expected);
    }
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, err) = run(&["certify", "--no-such-flag"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(!err.is_empty());
    let (code, _, _) = run(&["certify", "--grid", "12"]);
    assert_eq!(code, EXIT_ERROR);
    let (code, _, _) = run(&["certify", "--p", "0.5"]);
    assert_eq!(code, EXIT_ERROR);
}

#[test]
fn malformed_config_exits_two_and_names_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ \"name\": \"bad\", \"matrices\": 3 }").unwrap();
    let (code, _, err) = run(&["certify", "--config", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.to_lowercase().contains("matrices"), "{err}");
    let (code, _, _) = run(&["certify", "--config", "/nonexistent/config.json"]);
    assert_eq!(code, EXIT_ERROR);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_complex-ou");
    let status = Command::new(bin).args(["certify", "--config", "identity-2d"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_PASS));
    let status = Command::new(bin).args(["certify", "--config", "a4-violator"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_FAIL));
    let status = Command::new(bin).arg("--bogus").output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_ERROR));
}

#[test]
fn reports_are_deterministic() {
    let cfg = Config::bundled("rotating-pencil").unwrap().unwrap();
    let sel = Selection { kernel: true, lemma: true, ..Selection::CERTIFY };
    let first = run_selected(&cfg, sel).unwrap().to_json();
    let second = run_selected(&cfg, sel).unwrap().to_json();
    assert_eq!(first, second);
}

#[test]
fn every_anchor_is_documented() {
    let doc = include_str!("../docs/anchors.md");
    for id in anchor::ALL {
        assert!(doc.contains(&format!("`{id}`")), "{id} missing from docs/anchors.md");
    }
}

#[test]
fn config_round_trips_through_json() {
    let cfg = Config::bundled("identity-2d").unwrap().unwrap();
    let again = Config::from_json(&cfg.to_json()).unwrap();
    assert_eq!(cfg.to_json(), again.to_json());
}
