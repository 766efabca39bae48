use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const AXIS: &str = r#"{"dim": 2, "kind": "spider", "apex": ["0", "0"], "tips": [["1", "0"], ["0", "1"]]}"#;

fn minklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minklab")).args(args).output().expect("binary runs")
}

fn status(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn spec(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn audit_of_axis_spider_certifies_three_steps() {
    let dir = TempDir::new().unwrap();
    let set = spec(&dir, "axis.json", AXIS);
    let out = dir.path().join("report.json");
    let csv = dir.path().join("report.csv");
    let o = minklab(&[
        "audit", "--set", &set, "--kmax", "4", "--expect-monotone",
        "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(status(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&out);
    for key in ["command", "config", "entries", "flags", "version"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    let certified = r["entries"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["verdict"] == "certified-nondecreasing")
        .count();
    assert_eq!(certified, 3);
    assert_eq!(r["config"]["run"]["k_max"], 4);
    assert_eq!(r["config"]["spec"]["kind"], "spider");
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("k,lower,upper,verdict,hausdorff,seconds\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn gap_is_negative() {
    let o = minklab(&["counterexample", "gap", "--a", "3", "--b", "6"]);
    assert_eq!(status(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["flags"]["gap"].as_f64().unwrap() < 0.0);
    assert_eq!(r["flags"]["certified_negative"], true);
    assert_eq!(r["entries"][0]["volumes"]["v123"], "598");
}

#[test]
fn expectation_failure_on_a_mock_report() {
    let dir = TempDir::new().unwrap();
    let mock = spec(
        &dir,
        "mock.json",
        r#"{"command": "audit", "config": {}, "flags": {}, "version": "0",
            "entries": [{"k": 1}, {"k": 2, "verdict": "certified-nondecreasing"}, {"k": 3, "verdict": "certified-violation"}]}"#,
    );
    assert_eq!(status(&minklab(&["check", "--report", &mock, "--expect-monotone"])), 2);
    assert_eq!(status(&minklab(&["check", "--report", &mock])), 0);
}

#[test]
fn usage_and_io_statuses() {
    let dir = TempDir::new().unwrap();
    let bad = spec(&dir, "bad.json", r#"{"dim": 2, "kind": "spider", "apex": ["0", "0"], "tips": [["1", "0"], ["0"]]}"#);
    let o = minklab(&["audit", "--set", &bad]);
    assert_eq!(status(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("tips[1]"));
    assert_eq!(status(&minklab(&["audit", "--set", "/no/such/spec.json"])), 4);
    assert_eq!(status(&minklab(&["audit"])), 1);
    assert_eq!(status(&minklab(&["audit", "--set", &bad, "--res", "-1/8"])), 1);
    assert_eq!(status(&minklab(&["--help"])), 0);
    let unwritable = dir.path().join("missing").join("r.json");
    let set = spec(&dir, "axis.json", AXIS);
    let o = minklab(&["audit", "--set", &set, "--kmax", "2", "--no-hausdorff", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(status(&o), 4);
}

#[test]
fn singular_affine_is_refused_for_audits() {
    let dir = TempDir::new().unwrap();
    let set = spec(
        &dir,
        "flat.json",
        &format!(r#"{{"dim": 2, "kind": "affine", "matrix": [["1", "0"], ["1", "0"]], "translation": ["0", "0"], "inner": {AXIS}}}"#),
    );
    let o = minklab(&["audit", "--set", &set]);
    assert_eq!(status(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn cell_cap_is_infeasible() {
    // Four tips in space: no exact route, so only grids can measure it.
    let dir = TempDir::new().unwrap();
    let set = spec(
        &dir,
        "spider.json",
        r#"{"dim": 3, "kind": "spider", "apex": ["0", "0", "0"],
            "tips": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"], ["-1", "-1", "-1"]]}"#,
    );
    let o = minklab(&["audit", "--set", &set, "--kmax", "3", "--cap", "10", "--no-hausdorff", "--refine", "0"]);
    assert_eq!(status(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let dir = TempDir::new().unwrap();
    let set = spec(
        &dir,
        "spider.json",
        r#"{"dim": 2, "kind": "spider", "apex": ["0", "0"], "tips": [["1", "0"], ["-1/2", "3/4"], ["1/4", "-1"]]}"#,
    );
    let mut reports = Vec::new();
    for w in ["1", "3"] {
        let out = dir.path().join(format!("r{w}.json"));
        let o = minklab(&["audit", "--set", &set, "--kmax", "3", "--workers", w, "--out", out.to_str().unwrap()]);
        assert_eq!(status(&o), 0);
        let mut r = json(&out);
        for e in r["entries"].as_array_mut().unwrap() {
            e["seconds"] = Value::Null;
        }
        let run = r["config"]["run"].as_object_mut().unwrap();
        run.remove("workers");
        run.remove("out");
        reports.push(r);
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn boundary_presets() {
    for (shape, passes, rejected) in [("disc", true, false), ("annulus", true, false), ("disc-point", false, true)] {
        let o = minklab(&["boundary", "--shape", shape, "--res", "1/32"]);
        assert_eq!(status(&o), 0);
        let r: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(r["flags"]["passes"], passes, "{shape}");
        assert_eq!(r["flags"]["rejected"], rejected, "{shape}");
    }
}

#[test]
fn simplex_exact_and_sweep_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("s.csv");
    let o = minklab(&["simplex-exact", "--dim", "3", "--kmax", "4", "--csv", csv.to_str().unwrap()]);
    assert_eq!(status(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["entries"][2]["volume"], "1/27");
    assert_eq!(r["entries"][1]["stability_constant"], "72");
    assert!(fs::read_to_string(&csv).unwrap().contains("\n4,1/16,"));

    let csv = dir.path().join("w.csv");
    let o = minklab(&["sweep", "--a", "3,1", "--b", "6", "--csv", csv.to_str().unwrap()]);
    assert_eq!(status(&o), 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("a,b,d1,d2,v12,v13,v23,v123,gap\n"));
    assert!(text.contains("\n3,6,4,3,1,216,81,598,-0.0216"));
}

#[test]
fn lemma2_and_hausdorff() {
    let o = minklab(&["lemma2", "--dim", "2", "--k", "3", "--cells", "6", "--trials", "3"]);
    assert_eq!(status(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["flags"]["all_hold"], true);
    assert_eq!(r["entries"].as_array().unwrap().len(), 5);

    let dir = TempDir::new().unwrap();
    let set = spec(&dir, "axis.json", AXIS);
    let o = minklab(&["hausdorff", "--set", &set, "--ks", "2,4"]);
    assert_eq!(status(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((r["entries"][1]["distance"].as_f64().unwrap() - 0.125).abs() < 1e-9);
}
