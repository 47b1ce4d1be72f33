mod common;

use common::*;

#[test]
fn analyze_not_reports_oscillation_and_periodic_branch() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(dir.path(), "not.json", NOT_JSON);
    let run = ugd(&["analyze", path.to_str().unwrap(), "--state", "0"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(doc["properties"]["tcgr"]["branch"], "b3");
    assert_eq!(doc["causes"]["delay_sensitivity"][0], "oscillation");
    assert_eq!(doc["witnesses"]["hazard_free"]["walk"], serde_json::json!(["0", "1", "0"]));
}

#[test]
fn analyze_race_text_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(dir.path(), "race.json", RACE_JSON);
    let run = ugd(&["analyze", path.to_str().unwrap(), "--state", "00", "--format", "text"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("stable_reachable        01 10 11"), "{}", run.stdout);
    assert!(run.stdout.contains("delay_insensitive       no (multiple_limits)"));
}

#[test]
fn closed_field_requires_param() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(dir.path(), "buf.json", BUF_JSON);
    let path = path.to_str().unwrap();
    assert_eq!(ugd(&["analyze", path, "--state", "00"]).code, 2);
    let run = ugd(&["analyze", path, "--state", "00", "--param", "1"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(doc["limit"], "11");
    assert_eq!(doc["fundamental_mode"]["delay_insensitive"], true);
}

#[test]
fn param_rejected_for_autonomous_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(dir.path(), "not.json", NOT_JSON);
    assert_eq!(ugd(&["analyze", path.to_str().unwrap(), "--state", "0", "--param", "1"]).code, 2);
}

#[test]
fn malformed_models_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("missing.json", r#"{"n":1,"table":{"0":"1"}}"#),
        ("dup.json", r#"{"n":1,"table":{"0":"1","0":"0","1":"0"}}"#),
        ("both.json", r#"{"n":1,"table":{"0":"1","1":"0"},"coords":["!w1"]}"#),
        ("expr.json", r#"{"n":1,"coords":["w1 &"]}"#),
        ("range.json", r#"{"n":1,"coords":["w2"]}"#),
        ("syntax.json", "{"),
    ] {
        let path = write_model(dir.path(), name, body);
        let run = ugd(&["analyze", path.to_str().unwrap(), "--state", "0"]);
        assert_eq!(run.code, 2, "{name}: {}", run.stderr);
        assert!(!run.stderr.is_empty());
    }
    assert_eq!(ugd(&["analyze", "/nonexistent/model.json", "--state", "0"]).code, 2);
}

#[test]
fn graph_writes_well_formed_dot() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "race.json", RACE_JSON);
    let out = dir.path().join("race.dot");
    let run = ugd(&["graph", model.to_str().unwrap(), "--state", "00", "--out", out.to_str().unwrap()]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(well_formed_dot(&text), "{text}");
    assert!(text.contains("\"00\" -> \"11\";"));
    assert!(text.contains("peripheries=2"));
}

#[test]
fn orbit_and_oracle_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(dir.path(), "not.json", NOT_JSON);
    let path = path.to_str().unwrap();
    let orbit: serde_json::Value = serde_json::from_str(&ugd(&["orbit", path, "--state", "0"]).stdout).unwrap();
    assert_eq!((orbit["transient_len"].as_u64(), orbit["period"].as_u64()), (Some(0), Some(2)));
    let run = ugd(&["oracle-check", path, "--state", "0"]);
    assert_eq!(run.code, 0);
    let doc: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(doc["agree"], true);
}

#[test]
fn classify_all_lists_every_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(dir.path(), "race.json", RACE_JSON);
    let run = ugd(&["classify-all", path.to_str().unwrap()]);
    assert_eq!(run.code, 0);
    let doc: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(doc.as_array().unwrap().len(), 4);
}

#[test]
fn selftest_exhaustive_summary() {
    let run = ugd(&["selftest", "--n", "2"]);
    assert_eq!(run.code, 0);
    assert!(run.stderr.contains("exhaustive n=2: 1024 cases, 0 violations"), "{}", run.stderr);
    let doc: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(doc["passed"], true);
}

#[test]
fn selftest_width_out_of_range() {
    assert_eq!(ugd(&["selftest", "--n", "3"]).code, 2);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(ugd(&["--help"]).code, 0);
    assert_eq!(ugd(&["--version"]).code, 0);
    assert_eq!(ugd(&[]).code, 2);
}
