use std::path::Path;
use std::process::Command;

fn quakelab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_quakelab")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn norm_of_log_two_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let lam = write(dir.path(), "two.txt", "model halfplane\n-1 1 1\n-2 2 1\n");
    let (code, out, _) = quakelab(&["norm", "--lamination", &lam]);
    assert_eq!(code, 0);
    let value: f64 = out.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((value - 2.0).abs() < 1e-12);
}

#[test]
fn eval_with_empty_lamination_echoes_points() {
    let dir = tempfile::tempdir().unwrap();
    let lam = write(dir.path(), "empty.txt", "model halfplane\n");
    let (code, out, _) = quakelab(&["eval", "--lamination", &lam, "--boundary", "-2.5", "--boundary", "inf", "--interior", "0.3,1.7"]);
    assert_eq!(code, 0);
    for row in out.lines().skip(1) {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[1], f[3]);
        assert_eq!(f[2], f[4]);
    }
}

#[test]
fn scaling_path_ends_at_zero() {
    let (code, out, _) = quakelab(&["scaling-path", "--t0", "1"]);
    assert_eq!(code, 0);
    let last = out.lines().last().unwrap();
    let proxy: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
    assert!(proxy < 1e-6);
}

#[test]
fn reports_are_reproducible_and_formats_agree() {
    let dir = tempfile::tempdir().unwrap();
    let lam = write(dir.path(), "mu.txt", "model halfplane\n0.2 0.9 0.6\n-3 -1 0.4\n");
    let args = ["box-functional", "--lamination", &lam, "--boxes", "40", "--seed", "5"];
    let (_, a, _) = quakelab(&args);
    let (_, b, _) = quakelab(&args);
    assert_eq!(a, b);
    let json_path = dir.path().join("r.json");
    let mut with_json = args.to_vec();
    with_json.extend(["--format", "json", "--out", json_path.to_str().unwrap()]);
    assert_eq!(quakelab(&with_json).0, 0);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["experiment"], "box-functional");
    assert_eq!(report["params"]["seed"], 5);
    let rows = report["rows"].as_array().unwrap();
    for (line, row) in a.lines().skip(1).zip(rows) {
        let csv_diff: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(csv_diff, row[3].as_f64().unwrap());
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let crossing = write(dir.path(), "bad.txt", "model halfplane\n-1 1 1\n0 5 1\n");
    let (code, _, err) = quakelab(&["norm", "--lamination", &crossing]);
    assert_eq!(code, 1);
    assert!(err.contains("cross"));
    assert_eq!(quakelab(&["scaling-path", "--t0", "2"]).0, 1);
    assert_eq!(quakelab(&["no-such-command"]).0, 1);
    // a barycenter tolerance below rounding cannot be met; rows are kept
    let (code, out, _) = quakelab(&["scaling-path", "--tol", "1e-300", "--steps", "0.1"]);
    assert_eq!(code, 2);
    assert!(out.contains("did not converge"));
}

#[test]
fn flipped_leaf_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let lam = write(dir.path(), "mu.txt", "model halfplane\n-1 1 0.5\n2 3 0.7\n");
    let (code, out, err) = quakelab(&["verify-left", "--lamination", &lam, "--flip", "1", "--format", "json"]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["verdicts"][0]["passed"], false);
    assert!(err.contains("verdict left failed"));
}
