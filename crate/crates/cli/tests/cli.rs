use std::process::{Command, Output};

use serde_json::Value;

fn condbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_condbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_exhaustive_writes_records_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t1.jsonl");
    let out = condbound(&[
        "verify",
        "--theorem",
        "1",
        "--mode",
        "exhaustive",
        "--n",
        "2",
        "--coeff-range",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 82);
    let summary: Value = serde_json::from_str(lines[81]).unwrap();
    assert_eq!(summary["summary"], true);
    assert_eq!(summary["violation"], 0);
    assert_eq!(summary["total"], 81);
    // the summary is echoed on stdout as well
    assert_eq!(json(&out)["total"], 81);
}

#[test]
fn verify_csv_to_stdout() {
    let out = condbound(&["verify", "--problem", "relgap_poly", "--d", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "instance_id,family,actual_log2,bound_log2,margin_log2,status,witness"
    );
    assert_eq!(lines.count(), 18);
}

#[test]
fn identical_seeds_give_identical_reports() {
    let run = || {
        let out = condbound(&[
            "verify",
            "--theorem",
            "2",
            "--mode",
            "random",
            "--m",
            "3",
            "--n",
            "2",
            "--coeff-range",
            "3",
            "--seed",
            "7",
            "--count",
            "50",
        ]);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut summary: Value = serde_json::from_str(&lines.pop().unwrap()).unwrap();
        summary.as_object_mut().unwrap().remove("timestamp");
        (lines, summary)
    };
    assert_eq!(run(), run());
}

#[test]
fn degenerate_only_family_exits_zero() {
    // every 1x1 matrix with entry 0 is singular
    let out = condbound(&["verify", "--theorem", "1", "--n", "1", "--coeff-range", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["status"], "degenerate_skipped");
}

#[test]
fn graeffe_recovers_roots() {
    let out = condbound(&["graeffe", "--poly", "1,-7,14,-8", "--target-rel-err", "0.015625"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["within_target"], true);
    let roots: Vec<f64> = v["recovered"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    for (r, z) in roots.iter().zip([4.0, 2.0, 1.0]) {
        assert!((r - z).abs() / z <= 0.015625);
    }
}

#[test]
fn graeffe_refuses_complex_roots() {
    let out = condbound(&["graeffe", "--poly", "1,0,1", "--target-rel-err", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not real"));
}

#[test]
fn qr_from_file_and_inline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.txt");
    std::fs::write(&path, "2 2\n2 1\n1 2\n").unwrap();
    let a = json(&condbound(&[
        "qr",
        "--matrix",
        path.to_str().unwrap(),
        "--tol",
        "9.5367431640625e-7",
    ]));
    let b = json(&condbound(&[
        "qr",
        "--matrix",
        "[[2,1],[1,2]]",
        "--tol",
        "9.5367431640625e-7",
    ]));
    assert_eq!(a, b);
    assert_eq!(a["converged"], true);
    assert_eq!(a["prediction"]["a_posteriori"], 30);
    assert!(a["iterations"].as_u64().unwrap() <= 30);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(condbound(&["verify", "--problem", "nope"]).status.code(), Some(2));
    assert_eq!(condbound(&["verify"]).status.code(), Some(2));
    assert_eq!(
        condbound(&["verify", "--problem", "linsys", "--theorem", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        condbound(&["qr", "--matrix", "[[1,2],[2,1]]", "--tol", "0.1"])
            .status
            .code(),
        Some(2)
    );
    let refused = condbound(&["verify", "--theorem", "1", "--n", "4", "--coeff-range", "5"]);
    assert_eq!(refused.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("instances"));
}
