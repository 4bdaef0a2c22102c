use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cstar-verify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn scalar_axioms_pass() {
    let out = verify(&["--suite", "axioms", "--dims", "1x1", "--trials", "10"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 7);
    assert!(!text.contains("FAIL"));
}

#[test]
fn json_report_has_one_record_per_property() {
    let out = verify(&[
        "--suite", "all", "--dims", "1x1,2x3", "--trials", "3", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let props = v["properties"].as_array().unwrap();
    assert_eq!(props.len(), cstar_triple::suites::all_properties().len());
    for p in props {
        assert!(p["name"].is_string() && p["anchor"].is_string());
        assert_eq!(p["passed"], Value::Bool(p["failures"] == 0));
        assert!(p["witness"].is_null());
    }
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["seed"], 42);
    assert!(v["wall_time_secs"].is_number());
}

#[test]
fn identical_configs_give_identical_reports() {
    let args = [
        "--suite",
        "module,extreme",
        "--dims",
        "2x2",
        "--trials",
        "5",
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let mut a = json(&verify(&args));
    let mut b = json(&verify(&args));
    a["wall_time_secs"] = Value::Null;
    b["wall_time_secs"] = Value::Null;
    assert_eq!(a, b);
}

fn fixtures_in(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

#[test]
fn sign_flip_fails_cube_identity_and_witness_replays() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = verify(&[
        "--suite",
        "axioms",
        "--dims",
        "2x2",
        "--trials",
        "5",
        "--mutate",
        "triple-sign-flip",
        "--fixtures",
        d,
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let cube = v["properties"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["name"] == "axioms.cube_identity")
        .unwrap();
    assert_eq!(cube["passed"], false);
    let path = cube["witness"]["path"].as_str().unwrap();
    assert!(Path::new(path).exists());

    let replayed = verify(&["--check", path]);
    assert_eq!(replayed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&replayed.stdout).starts_with("FAIL axioms.cube_identity"));

    // Every witness written reproduces its failure.
    for f in fixtures_in(dir.path()) {
        let r = verify(&["--check", f.to_str().unwrap(), "--format", "json"]);
        assert_eq!(r.status.code(), Some(1), "{}", f.display());
        assert_eq!(json(&r)["passed"], false);
    }
}

#[test]
fn dropped_root_factor_is_detected() {
    let out = verify(&[
        "--suite",
        "ball",
        "--dims",
        "2x2",
        "--trials",
        "5",
        "--mutate",
        "drop-sqrt-factor",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .any(|l| l.starts_with("FAIL ball.bergmann_sqrt_square")));
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        &["--dims", "0x2"][..],
        &["--dims", ""],
        &["--trials", "0"],
        &["--suite", "everything"],
        &["--format", "xml"],
        &["--tol", "-1"],
        &["--mutate", "nonsense"],
        &["--property", "module.nope"],
        &["--check", "/nonexistent/fixture"],
    ] {
        let out = verify(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn malformed_fixture_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.fixture");
    std::fs::write(
        &path,
        "# property: axioms.cube_identity\n# space: 2 2\n1 1\n0.5,0\n",
    )
    .unwrap();
    let out = verify(&["--check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn property_filter_and_tolerance_flag() {
    let out = verify(&[
        "--suite",
        "ball",
        "--property",
        "ball.scalar_mobius",
        "--dims",
        "1x1,2x2",
        "--tol",
        "1e-9",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let props = v["properties"].as_array().unwrap();
    assert_eq!(props.len(), 1);
    assert_eq!(props[0]["dims"], serde_json::json!(["1x1"]));
    assert_eq!(props[0]["trials_run"], 400);
    assert_eq!(v["tolerances"]["abs_tol"], 1e-9);
}

#[test]
fn help_exits_cleanly() {
    let out = verify(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--fixtures"));
}

#[test]
fn report_matches_documented_schema_keys() {
    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json"),
        )
        .unwrap(),
    )
    .unwrap();
    let out = verify(&[
        "--suite",
        "axioms",
        "--dims",
        "1x1",
        "--trials",
        "2",
        "--mutate",
        "triple-sign-flip",
        "--format",
        "json",
    ]);
    let v = json(&out);
    let keys = |o: &Value| -> Vec<String> { o.as_object().unwrap().keys().cloned().collect() };
    let required = |s: &Value| -> Vec<String> {
        s["required"]
            .as_array()
            .unwrap()
            .iter()
            .map(|k| k.as_str().unwrap().to_string())
            .collect()
    };
    let allowed = |s: &Value| keys(&s["properties"]);

    for k in required(&schema) {
        assert!(v.get(&k).is_some(), "top-level {k}");
    }
    for k in keys(&v) {
        assert!(allowed(&schema).contains(&k), "undocumented top-level {k}");
    }
    let prop_schema = &schema["$defs"]["property"];
    let witness_schema = &schema["$defs"]["witness"];
    for p in v["properties"].as_array().unwrap() {
        for k in required(prop_schema) {
            assert!(p.get(&k).is_some(), "property {k}");
        }
        for k in keys(p) {
            assert!(
                allowed(prop_schema).contains(&k),
                "undocumented property key {k}"
            );
        }
        if let Some(w) = p["witness"].as_object() {
            for k in w.keys() {
                assert!(
                    allowed(witness_schema).contains(k),
                    "undocumented witness key {k}"
                );
            }
        }
    }
}
