//! End-to-end tests of the `rys` binary: output contracts, schema
//! conformance, reproducibility, and exit codes.

use serde_json::Value;
use std::process::{Command, Output};

fn rys() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rys"));
    cmd.env_remove("RYS_DIGITS");
    cmd
}

fn run_ok(args: &[&str]) -> String {
    let out = rys().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "rys {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

fn run_raw(args: &[&str]) -> Output {
    rys().args(args).output().expect("binary runs")
}

/// Minimal JSON-Schema walker covering the constructs the shipped schema
/// uses: type (single or union), required, properties,
/// additionalProperties, items, minItems, minimum. Failing here means the
/// emitted documents and `schema/output.schema.json` have drifted apart.
fn validate(schema: &Value, doc: &Value, path: &str) {
    if let Some(ty) = schema.get("type") {
        let allowed: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().map(|v| v.as_str().unwrap()).collect(),
            _ => panic!("unsupported type clause at {path}"),
        };
        let actual = match doc {
            Value::Null => "null",
            Value::Bool(_) => "boolean",
            Value::Number(n) => {
                if allowed.contains(&"integer") && (n.is_i64() || n.is_u64()) {
                    "integer"
                } else {
                    "number"
                }
            }
            Value::String(_) => "string",
            Value::Array(_) => "array",
            Value::Object(_) => "object",
        };
        assert!(
            allowed.contains(&actual),
            "{path}: type {actual} not in {allowed:?}"
        );
    }
    if let Some(req) = schema.get("required").and_then(|r| r.as_array()) {
        let obj = doc.as_object().unwrap_or_else(|| panic!("{path}: not an object"));
        for key in req {
            let key = key.as_str().unwrap();
            assert!(obj.contains_key(key), "{path}: missing required key {key}");
        }
    }
    if let Some(props) = schema.get("properties").and_then(|p| p.as_object()) {
        if let Some(obj) = doc.as_object() {
            for (key, sub) in props {
                if let Some(v) = obj.get(key) {
                    validate(sub, v, &format!("{path}.{key}"));
                }
            }
            match schema.get("additionalProperties") {
                Some(Value::Bool(false)) => {
                    for key in obj.keys() {
                        assert!(
                            props.contains_key(key),
                            "{path}: unexpected key {key}"
                        );
                    }
                }
                Some(other) if other.is_object() => {
                    for (key, v) in obj {
                        if !props.contains_key(key) {
                            validate(other, v, &format!("{path}.{key}"));
                        }
                    }
                }
                _ => {}
            }
        }
    } else if let Some(extra) = schema.get("additionalProperties") {
        if extra.is_object() {
            if let Some(obj) = doc.as_object() {
                for (key, v) in obj {
                    validate(extra, v, &format!("{path}.{key}"));
                }
            }
        }
    }
    if let Some(items) = schema.get("items") {
        if let Some(arr) = doc.as_array() {
            if let Some(min) = schema.get("minItems").and_then(|m| m.as_u64()) {
                assert!(
                    arr.len() as u64 >= min,
                    "{path}: fewer than {min} items"
                );
            }
            for (i, v) in arr.iter().enumerate() {
                validate(items, v, &format!("{path}[{i}]"));
            }
        }
    }
    if let Some(min) = schema.get("minimum").and_then(|m| m.as_f64()) {
        if let Some(n) = doc.as_f64() {
            assert!(n >= min, "{path}: {n} below minimum {min}");
        }
    }
}

fn shipped_schema() -> Value {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/schema/output.schema.json"
    ))
    .expect("schema file ships with the crate");
    serde_json::from_str(&text).expect("schema file is valid JSON")
}

type CsvSummary = Vec<(String, Option<f64>)>;

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<Option<f64>>>, CsvSummary) {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header")
        .split(',')
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for line in lines {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest.split_once(',').expect("summary line has a comma");
            let val = if v.is_empty() {
                None
            } else {
                Some(v.parse::<f64>().expect("summary value parses"))
            };
            summary.push((k.to_string(), val));
        } else {
            let row: Vec<Option<f64>> = line
                .split(',')
                .map(|f| {
                    if f.is_empty() {
                        None
                    } else {
                        Some(f.parse::<f64>().expect("field parses"))
                    }
                })
                .collect();
            assert_eq!(row.len(), header.len(), "ragged CSV row: {line}");
            rows.push(row);
        }
    }
    (header, rows, summary)
}

fn summary_value(summary: &[(String, Option<f64>)], key: &str) -> Option<f64> {
    summary
        .iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("summary key {key} missing"))
        .1
}

#[test]
fn moments_csv_contract_at_legendre() {
    let text = run_ok(&[
        "moments", "--n", "10", "--lambda", "0.5", "--z", "0", "--format", "csv",
    ]);
    let (header, rows, summary) = parse_csv(&text);
    assert_eq!(header, ["m", "s_m", "residual"]);
    assert_eq!(rows.len(), 11, "N=10 means rows m=0,2,...,20");
    // s_0 = integral of dx over (-1,1) = 2, printed exactly.
    assert!(text.lines().nth(1).unwrap().starts_with("0,2,"));
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0], Some(2.0 * k as f64));
        assert!(row[1].unwrap() > 0.0, "moments are positive");
        assert!(row[2].unwrap().abs() <= 1e-42, "recurrence residual");
    }
    let max = summary_value(&summary, "max_moment_recurrence_residual").unwrap();
    assert!(max <= 1e-42);
}

#[test]
fn every_table_command_validates_against_the_shipped_schema() {
    let schema = shipped_schema();
    let runs: Vec<Vec<&str>> = vec![
        vec!["moments", "--n", "4", "--z", "0.5", "--lambda", "1"],
        vec!["recurrence", "--n", "4", "--z", "0.5", "--lambda", "-0.4"],
        vec!["quadrature", "--n", "4", "--z", "0.5", "--lambda", "2.5"],
        vec!["zeros", "--n", "4", "--z", "0", "--lambda", "0.5"],
        vec![
            "flow", "--z0", "0.5", "--z1", "0.6", "--steps", "2", "--n", "3", "--with-zeros",
        ],
    ];
    for args in runs {
        let text = run_ok(&args);
        let doc: Value = serde_json::from_str(&text)
            .unwrap_or_else(|e| panic!("{args:?} emitted invalid JSON: {e}"));
        validate(&schema, &doc, args[0]);
        // Stricter than the schema: every row exactly as wide as `columns`.
        let cols = doc["columns"].as_array().unwrap().len();
        for row in doc["rows"].as_array().unwrap() {
            assert_eq!(row.as_array().unwrap().len(), cols);
        }
        assert_eq!(doc["params"]["command"].as_str().unwrap(), args[0]);
    }
}

#[test]
fn output_is_bit_reproducible_and_out_file_matches_stdout() {
    let args = [
        "recurrence", "--n", "6", "--z", "1.25", "--lambda", "0.3", "--format", "csv",
    ];
    let first = run_ok(&args);
    let second = run_ok(&args);
    assert_eq!(first.as_bytes(), second.as_bytes(), "reruns must be byte-identical");

    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("table.csv");
    let mut with_out: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    with_out.push("--out".into());
    with_out.push(path.to_str().unwrap().into());
    let arg_refs: Vec<&str> = with_out.iter().map(|s| s.as_str()).collect();
    let stdout_of_out_run = run_ok(&arg_refs);
    assert!(stdout_of_out_run.is_empty(), "--out writes nothing to stdout");
    let file_bytes = std::fs::read(&path).expect("output file written");
    assert_eq!(file_bytes, first.as_bytes(), "--out file equals stdout bytes");

    // Same determinism for JSON.
    let jargs = ["moments", "--n", "3", "--z", "2", "--lambda", "1.5"];
    assert_eq!(run_ok(&jargs), run_ok(&jargs));
}

#[test]
fn quadrature_single_node_carries_the_total_mass() {
    let text = run_ok(&[
        "quadrature", "--n", "1", "--z", "1", "--lambda", "0.5", "--format", "csv",
    ]);
    let (_, rows, summary) = parse_csv(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], Some(0.0));
    assert_eq!(rows[0][1], Some(0.0), "symmetric weight: the single node is 0");
    let weight = rows[0][2].unwrap();
    // Independent value of s_0 from the moments command.
    let (_, mrows, _) = parse_csv(&run_ok(&[
        "moments", "--n", "1", "--z", "1", "--lambda", "0.5", "--format", "csv",
    ]));
    let s0 = mrows[0][1].unwrap();
    assert!((weight - s0).abs() <= 1e-12 * s0);
    assert!(summary_value(&summary, "max_exactness_error").unwrap() <= 1e-12);
    assert!(summary_value(&summary, "weight_sum_minus_s0").unwrap().abs() <= 1e-12);
}

#[test]
fn quadrature_weights_are_positive_and_exact() {
    let text = run_ok(&[
        "quadrature", "--n", "12", "--z", "2", "--lambda", "-0.4", "--format", "csv",
    ]);
    let (_, rows, summary) = parse_csv(&text);
    assert_eq!(rows.len(), 12);
    for row in &rows {
        assert!(row[2].unwrap() > 0.0, "Gauss weights are positive");
    }
    assert!(summary_value(&summary, "max_exactness_error").unwrap() <= 1e-12);
}

#[test]
fn zeros_odd_degree_has_an_exact_zero_and_opposing_velocities() {
    let text = run_ok(&[
        "zeros", "--n", "5", "--z", "1", "--lambda", "1", "--format", "csv",
    ]);
    let (_, rows, summary) = parse_csv(&text);
    assert_eq!(rows.len(), 5);
    // Symmetric weight, odd degree: the middle zero is exactly 0 and is
    // printed as such.
    assert!(text.lines().nth(3).unwrap().starts_with("2,0,"));
    for row in &rows {
        let x = row[1].unwrap();
        let v = row[2].unwrap();
        if x != 0.0 {
            assert!(
                x * v < 0.0,
                "rising z squeezes zeros toward the origin: x={x}, v={v}"
            );
        } else {
            assert_eq!(v, 0.0);
        }
    }
    assert!(summary_value(&summary, "electrostatic_gradient_residual").unwrap() <= 1e-8);
    assert!(summary_value(&summary, "beta_ladder_residual").unwrap() <= 1e-12);
    assert!(summary_value(&summary, "beta_n").unwrap() > 1.0);
}

#[test]
fn zeros_at_z0_null_out_the_flow_quantities() {
    let text = run_ok(&[
        "zeros", "--n", "4", "--z", "0", "--lambda", "1", "--format", "csv",
    ]);
    let (_, rows, summary) = parse_csv(&text);
    for row in &rows {
        assert!(row[2].is_none(), "velocity is a z>0 notion");
    }
    assert!(summary_value(&summary, "beta_n").is_none());
    assert!(summary_value(&summary, "electrostatic_gradient_residual").is_none());
}

#[test]
fn flow_checkpoints_track_the_fresh_pipeline() {
    let text = run_ok(&[
        "flow", "--z0", "0.5", "--z1", "1", "--steps", "4", "--n", "4", "--format", "csv",
    ]);
    let (header, rows, summary) = parse_csv(&text);
    assert_eq!(
        header,
        ["z", "gamma_1", "gamma_2", "gamma_3", "gamma_4", "fresh_deviation"]
    );
    assert_eq!(rows.len(), 5, "steps=4 means 5 checkpoints");
    for (i, row) in rows.iter().enumerate() {
        let z = row[0].unwrap();
        assert!((z - (0.5 + 0.125 * i as f64)).abs() < 1e-15);
        assert!(row[5].unwrap() <= 1e-8, "deviation from fresh pipeline");
    }
    assert!(summary_value(&summary, "max_fresh_deviation").unwrap() <= 1e-8);
}

#[test]
fn flow_zero_length_range_emits_one_checkpoint() {
    let text = run_ok(&[
        "flow", "--z0", "0.75", "--z1", "0.75", "--n", "3", "--format", "csv",
    ]);
    let (_, rows, _) = parse_csv(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], Some(0.75));
}

#[test]
fn flow_zero_squares_decrease_monotonically_in_z() {
    let text = run_ok(&[
        "flow", "--z0", "0.1", "--z1", "2", "--steps", "19", "--n", "4", "--with-zeros",
        "--format", "csv",
    ]);
    let (header, rows, _) = parse_csv(&text);
    assert_eq!(rows.len(), 20, "z = 0.1, 0.2, ..., 2.0");
    let x_cols: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("x_"))
        .map(|(i, _)| i)
        .collect();
    assert_eq!(x_cols.len(), 4);
    for w in rows.windows(2) {
        for &c in &x_cols {
            let a = w[0][c].unwrap();
            let b = w[1][c].unwrap();
            assert!(
                b * b < a * a,
                "x^2 must decrease strictly as z grows: {a} -> {b}"
            );
        }
    }
}

#[test]
fn verify_passes_on_a_sound_point() {
    let out = run_raw(&["verify", "--z", "1", "--lambda", "1", "--n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
    assert!(text.contains("0 failed"));
}

#[test]
fn verify_rejects_out_of_domain_lambda_with_exit_2() {
    let out = run_raw(&["verify", "--lambda", "-0.6"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("lambda"), "stderr names the offending parameter: {err}");
}

#[test]
fn verify_detects_an_injected_coefficient_fault_with_exit_1() {
    let out = run_raw(&[
        "verify", "--z", "1", "--lambda", "1", "--n", "6", "--perturb-gamma", "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL"), "residuals must expose the corruption");
}

#[test]
fn usage_errors_exit_2() {
    let out = run_raw(&["moments", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_raw(&["moments", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2), "N=0 is a domain error");
    let out = run_raw(&["moments", "--z", "-1"]);
    assert_eq!(out.status.code(), Some(2), "negative z is a domain error");
}

#[test]
fn rys_digits_env_is_honored_and_the_flag_wins() {
    let out = rys()
        .env("RYS_DIGITS", "35")
        .args(["moments", "--n", "2"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["params"]["digits"].as_u64(), Some(35));

    let out = rys()
        .env("RYS_DIGITS", "35")
        .args(["moments", "--n", "2", "--digits", "60"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["params"]["digits"].as_u64(), Some(60));
}
