use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn hexset(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hexset"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_kind(out: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["schema"], 1);
    v["error"]["kind"].as_str().unwrap().to_owned()
}

fn csv_column(path: &Path, column: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == column).unwrap();
    lines
        .map(|l| l.split(',').nth(i).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn levelset_unit_interval() {
    let out = hexset(
        &["levelset", "--input", "-"],
        r#"{"schema": 1, "set": [[0, 1]], "lambda": 0.6931471805599453}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["pass"], true);
    let root = v["roots"][0].as_f64().unwrap();
    assert!((root + 1.0).abs() < 1e-15, "{root}");
}

#[test]
fn stein_weiss_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = hexset(
        &[
            "stein-weiss",
            "--input",
            "-",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        r#"{"set": [[0, 1]]}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    let errors = csv_column(&dir.path().join("stein_weiss.csv"), "rel_error");
    assert_eq!(errors.len(), 20);
    assert!(errors.iter().all(|e| *e <= 1e-6));
    assert!(dir.path().join("stein-weiss.json").exists());
}

#[test]
fn configuration_errors_exit_2() {
    for (args, input) in [
        (vec!["levelset", "--input", "-"], "{not json"),
        (
            vec!["levelset", "--input", "-"],
            r#"{"set": [[0, 1]], "lambda": 1, "extra": 0}"#,
        ),
        (
            vec!["levelset", "--input", "-"],
            r#"{"schema": 2, "set": [[0, 1]], "lambda": 1}"#,
        ),
        (
            vec!["levelset", "--input", "-"],
            r#"{"set": [[1, 0]], "lambda": 1}"#,
        ),
        (
            vec!["levelset", "--input", "-", "--tol", "-1"],
            r#"{"set": [[0, 1]], "lambda": 1}"#,
        ),
        (vec!["levelset"], ""),
        (
            vec!["kk", "--input", "-"],
            r#"{"set": [[0, 0.1]], "alpha": 0.2}"#,
        ),
        (vec!["no-such-command"], ""),
    ] {
        let out = hexset(&args, input);
        assert_eq!(out.status.code(), Some(2), "{args:?} {input}");
        assert_eq!(error_kind(&out), "config");
    }
}

#[test]
fn whitney_cells_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = hexset(
        &[
            "whitney",
            "--input",
            "-",
            "--depth",
            "4",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        r#"{"set": [[0, 1], [2, 3]]}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["cells"], 16);
    let text = std::fs::read_to_string(dir.path().join("whitney.csv")).unwrap();
    assert!(text.starts_with("start,end,component,level,side,weight\n"));
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn transform_marks_endpoints() {
    let out = hexset(
        &[
            "transform",
            "--input",
            "-",
            "--kernel-normalization",
            "bare",
        ],
        r#"{"set": [[0, 1]], "points": [1, 2], "epsilons": [0.5]}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert!(rows[0]["value"].is_null());
    let bare = rows[2]["value"].as_f64().unwrap();
    assert!((bare - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn theorem_constructions_pass() {
    let out = hexset(
        &["construct-thm1", "--input", "-", "--depth", "6"],
        r#"{"points": [0]}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    let w = &json(&out)["witnesses"][0];
    let best = w["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .fold(0.0, f64::max);
    assert!(best >= 5.0);

    let out = hexset(
        &["construct-thm2", "--input", "-"],
        r#"{"points": [0], "eta": 0.5}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["construction"]["continuous"], true);
}

#[test]
fn verification_failure_exits_1() {
    // the requested partial-sum bound is not reached at this budget
    let out = hexset(
        &["kk", "--input", "-"],
        r#"{"set": [[0, 0.1]], "m_budget": 64}"#,
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn verify_all_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let run = |dir: &Path| {
        hexset(
            &["verify-all", "--seed", "42", "--out", dir.to_str().unwrap()],
            "",
        )
    };
    let (x, y) = (run(a.path()), run(b.path()));
    assert_eq!(x.stdout, y.stdout);
    assert!(!x.stdout.is_empty());
    for name in ["verify-all.json", "verify_all.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap()
        );
    }
    assert_eq!(json(&x)["identities"].as_array().unwrap().len(), 18);
}
