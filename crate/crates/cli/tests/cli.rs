use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpqs-lab"))
        .args(args)
        .env("DPQS_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn series_dump() {
    let v = stdout_json(&lab(&["series", "--name", "Pct", "--order", "16"]));
    assert_eq!(v["order"], 16);
    assert_eq!(v["coeffs"][2], "1/1");
    assert_eq!(v["coeffs"].as_array().unwrap().len(), 17);
}

#[test]
fn select_cost_exact() {
    let v = stdout_json(&lab(&[
        "select-cost",
        "--strategy",
        "ct",
        "--n",
        "6",
        "--j",
        "2",
        "--exact",
    ]));
    let expected = exact_value_matching_float("ct", 6, 2);
    assert_eq!(v["value"], expected);
    assert_eq!(v["backend"], "exact");
}

fn exact_value_matching_float(strategy: &str, n: usize, j: usize) -> String {
    // the exact backend must agree with the float backend
    let out = lab(&[
        "select-cost",
        "--strategy",
        strategy,
        "--n",
        &n.to_string(),
        "--j",
        &j.to_string(),
        "--float",
    ]);
    let f: f64 = stdout_json(&out)["value"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    let exact = lab(&[
        "select-cost",
        "--strategy",
        strategy,
        "--n",
        &n.to_string(),
        "--j",
        &j.to_string(),
    ]);
    let v = stdout_json(&exact)["value"].as_str().unwrap().to_string();
    let (num, den) = v.split_once('/').unwrap();
    let r = num.parse::<f64>().unwrap() / den.parse::<f64>().unwrap();
    assert!((r - f).abs() < 1e-12);
    v
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate",
        "--strategy",
        "yar",
        "--n",
        "50",
        "--grand",
        "--trials",
        "20000",
        "--seed",
        "7",
    ];
    let a = lab(&args);
    let b = lab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["trials"], 20000);
    assert!(v["stderr"].as_f64().unwrap() > 0.0);
}

#[test]
fn simulate_single_trial_has_null_stderr() {
    let v = stdout_json(&lab(&[
        "simulate",
        "--strategy",
        "ct",
        "--n",
        "5",
        "--j",
        "1",
        "--trials",
        "1",
    ]));
    assert!(v["stderr"].is_null());
}

#[test]
fn csv_outputs_carry_header_comment() {
    let out = lab(&[
        "partition-cost",
        "--strategy",
        "sf",
        "--n-max",
        "6",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# dpqs-lab v1"));
    assert_eq!(lines.next(), Some("strategy,n,value,backend"));
    assert_eq!(lines.next(), Some("sf,2,1/1,exact"));
    assert_eq!(lines.last(), Some("sf,6,23/3,exact"));
}

#[test]
fn concordance_writes_both_forms_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = lab(&[
        "concordance",
        "--n-max",
        "8",
        "--trials",
        "2000",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["summary"]["violations"], 0);
    let findings = json["summary"]["finding_groups"].as_array().unwrap();
    assert!(findings.iter().any(|g| g["strategy"] == "sf"
        && g["note"]
            .as_str()
            .unwrap()
            .contains("registered discrepancy")));
    let csv = std::fs::read_to_string(path.with_extension("csv")).unwrap();
    assert!(csv.starts_with("# dpqs-lab v1\n"));
}

#[test]
fn concordance_n2_all_grand_one() {
    let v = stdout_json(&lab(&["concordance", "--n-max", "2", "--trials", "0"]));
    for s in ["sf", "lf", "ct", "cv", "yar", "classical"] {
        let row = v["rows"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| {
                r["strategy"] == s
                    && r["n"] == 2
                    && r["target"] == "grand"
                    && r["status"] == "reference"
            })
            .unwrap();
        assert_eq!(row["value"], "1/1", "{s}");
    }
}

#[test]
fn concordance_is_byte_identical() {
    let args = [
        "concordance",
        "--n-max",
        "5",
        "--trials",
        "500",
        "--seed",
        "3",
    ];
    assert_eq!(lab(&args).stdout, lab(&args).stdout);
}

#[test]
fn asymptotics_partition_consistent() {
    let out = lab(&[
        "asymptotics",
        "--strategy",
        "ct",
        "--partition",
        "--n-max",
        "1024",
    ]);
    let v = stdout_json(&out);
    assert!(v["slope"].as_f64().unwrap().abs() < 0.05);
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn usage_errors() {
    assert_eq!(
        lab(&["concordance", "--strategy", ""]).status.code(),
        Some(2)
    );
    assert_eq!(
        lab(&["select-cost", "--strategy", "ct", "--n", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lab(&["select-cost", "--strategy", "ct", "--n", "4", "--j", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(lab(&["series", "--name", "nope"]).status.code(), Some(2));
    assert_eq!(
        lab(&["simulate", "--strategy", "bogus", "--n", "4", "--grand"])
            .status
            .code(),
        Some(2)
    );
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_dpqs-lab"))
        .args(["series", "--name", "Pct"])
        .env("DPQS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}
