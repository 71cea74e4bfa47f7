use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use opcstar_core::io::{read_theory, theory_to_json};
use opcstar_core::models::Model;
use serde_json::Value;

fn opcstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opcstar"))
        .args(args)
        .output()
        .unwrap()
}

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

/// Numeric comparison of two JSON trees; strings and shapes must match exactly.
fn assert_close(a: &Value, b: &Value, tol: f64, path: &str) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!((x - y).abs() <= tol, "{path}: {x} vs {y}");
        }
        (Value::Array(x), Value::Array(y)) => {
            assert_eq!(x.len(), y.len(), "{path}");
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                assert_close(u, v, tol, &format!("{path}[{i}]"));
            }
        }
        (Value::Object(x), Value::Object(y)) => {
            assert_eq!(
                x.keys().collect::<Vec<_>>(),
                y.keys().collect::<Vec<_>>(),
                "{path}"
            );
            for (k, u) in x {
                assert_close(u, &y[k], tol, &format!("{path}.{k}"));
            }
        }
        _ => assert_eq!(a, b, "{path}"),
    }
}

fn write_theory(dir: &Path, name: &str, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let (theory, _) = Model::Classical(2).build().unwrap();
    let mut v: Value = serde_json::from_str(&theory_to_json(&theory).unwrap()).unwrap();
    edit(&mut v);
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    path
}

#[test]
fn validate_qubit_succeeds() {
    let out = opcstar(&["validate", "--model", "qubit"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS  identity_neutrality"));
    assert!(text.lines().last().unwrap().starts_with("ok:") || text.contains("\nok:"));
}

#[test]
fn classical_gns_report_lists_form_eigenvalues() {
    let out = opcstar(&["gns", "--model", "classical2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_of(&out);
    assert_eq!(report["schema"], 1);
    assert_eq!(
        report["data"]["form_eigenvalues"],
        serde_json::json!([0.5, 0.5])
    );
    assert!(report["timings"]["total_ms"].is_f64());
}

#[test]
fn gns_reports_match_golden_files() {
    for model in ["qubit", "classical2"] {
        let out = opcstar(&["gns", "--model", model, "--format", "json", "--no-timings"]);
        let golden: Value = serde_json::from_str(
            &std::fs::read_to_string(repo_file(&format!(
                "crates/cli/tests/golden/gns_{model}.json"
            )))
            .unwrap(),
        )
        .unwrap();
        let mut got = json_of(&out);
        let mut golden = golden;
        // the version string moves with releases
        got.as_object_mut().unwrap().remove("version");
        golden.as_object_mut().unwrap().remove("version");
        assert_close(&got, &golden, 1e-12, model);
    }
}

#[test]
fn exported_theories_match_checked_in_files() {
    for model in ["qubit", "classical2"] {
        let out = opcstar(&["export-theory", model]);
        assert_eq!(out.status.code(), Some(0));
        let on_disk =
            std::fs::read_to_string(repo_file(&format!("theories/{model}.json"))).unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), on_disk);
        let loaded = read_theory(&repo_file(&format!("theories/{model}.json"))).unwrap();
        let (built, _) = model.parse::<Model>().unwrap().build().unwrap();
        assert_eq!(loaded, built);
    }
}

#[test]
fn malformed_json_exits_with_schema_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"name\": ").unwrap();
    let out = opcstar(&["validate", "--theory", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.json"), "{err}");
}

#[test]
fn unknown_field_and_wrong_dimension_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let extra = write_theory(dir.path(), "extra.json", |v| {
        v["colour"] = Value::from("blue");
    });
    assert_eq!(
        opcstar(&["validate", "--theory", extra.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let short = write_theory(dir.path(), "short.json", |v| {
        v["unit_effect"] = serde_json::json!([1.0]);
    });
    assert_eq!(
        opcstar(&["validate", "--theory", short.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn axiom_violation_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // an entry above one breaks substochasticity
    let bad = write_theory(dir.path(), "bad.json", |v| {
        v["transformations"][0]["matrix"][0][0] = Value::from(1.5);
    });
    let out = opcstar(&[
        "validate",
        "--theory",
        bad.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = json_of(&out);
    assert_eq!(report["passed"], false);
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["verdict"] == "fail"));
}

#[test]
fn missing_faithful_state_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_theory(dir.path(), "plain.json", |v| {
        v.as_object_mut().unwrap().remove("faithful_state");
    });
    let p = path.to_str().unwrap();
    assert_eq!(opcstar(&["validate", "--theory", p]).status.code(), Some(0));
    assert_eq!(opcstar(&["gns", "--theory", p]).status.code(), Some(2));
}

#[test]
fn theory_source_flags() {
    assert_eq!(opcstar(&["validate"]).status.code(), Some(2));
    assert_eq!(
        opcstar(&["validate", "--model", "qutrit"]).status.code(),
        Some(2)
    );
    let both = opcstar(&["validate", "--model", "qubit", "--theory", "x.json"]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn every_suite_command_succeeds_on_both_models() {
    for model in ["qubit", "classical2"] {
        let named = if model == "qubit" { "ry" } else { "shift" };
        for args in [
            vec!["faithful"],
            vec!["transpose", "--transformation", named],
            vec!["cstar", "--samples", "10", "--seed", "5"],
            vec!["born", "--trials", "5", "--seed", "5"],
        ] {
            let mut full = args.clone();
            full.extend(["--model", model]);
            let out = opcstar(&full);
            assert_eq!(
                out.status.code(),
                Some(0),
                "{full:?}: {}",
                String::from_utf8_lossy(&out.stdout)
            );
        }
    }
}

#[test]
fn transpose_reports_named_matrix() {
    let out = opcstar(&[
        "transpose",
        "--model",
        "classical2",
        "--transformation",
        "reset",
        "--format",
        "json",
    ]);
    let report = json_of(&out);
    // classical transpose is the matrix transpose
    assert_eq!(
        report["data"]["matrix"],
        serde_json::json!([[1.0, 1.0], [0.0, 0.0]])
    );
    assert_eq!(
        report["data"]["transposed"],
        serde_json::json!([[1.0, 0.0], [1.0, 0.0]])
    );
}

#[test]
fn calibrate_writes_and_reads_counts() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("counts.csv");
    let estimate = dir.path().join("estimate.json");
    let out = opcstar(&[
        "calibrate",
        "--model",
        "qubit",
        "--transformation",
        "proj_z+",
        "--shots",
        "200000",
        "--seed",
        "7",
        "--counts-out",
        counts.to_str().unwrap(),
        "--estimate-out",
        estimate.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let first = json_of(&out);

    let csv = std::fs::read_to_string(&counts).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("i,j,count"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6 * 6 + 1);
    assert!(rows.last().unwrap().starts_with(",,"));
    let total: u64 = rows
        .iter()
        .map(|r| r.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 200_000);

    let fragment: Value =
        serde_json::from_str(&std::fs::read_to_string(&estimate).unwrap()).unwrap();
    assert_eq!(fragment["matrix"], first["data"]["estimate"]);

    let again = opcstar(&[
        "calibrate",
        "--model",
        "qubit",
        "--transformation",
        "proj_z+",
        "--counts-in",
        counts.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(again.status.code(), Some(0));
    let second = json_of(&again);
    assert_eq!(second["data"]["estimate"], first["data"]["estimate"]);
    assert_eq!(
        second["data"]["frobenius_error"],
        first["data"]["frobenius_error"]
    );
}

#[test]
fn calibrate_projection_stays_physical() {
    let out = opcstar(&[
        "calibrate",
        "--model",
        "classical2",
        "--transformation",
        "select_0",
        "--shots",
        "1000",
        "--project",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_of(&out);
    let m = report["data"]["estimate"].as_array().unwrap();
    assert!(m
        .iter()
        .flat_map(|r| r.as_array().unwrap())
        .all(|x| x.as_f64().unwrap() >= 0.0));
}

#[test]
fn calibrate_zero_shots_reports_round_trip_only() {
    let out = opcstar(&[
        "calibrate",
        "--model",
        "qubit",
        "--transformation",
        "rx",
        "--shots",
        "0",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_of(&out);
    assert_eq!(report["checks"].as_array().unwrap().len(), 1);
    assert!(report["data"].get("estimate").is_none());
}

#[test]
fn report_goes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = opcstar(&[
        "faithful",
        "--model",
        "qubit",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["command"], "faithful");
}
