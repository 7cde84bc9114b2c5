use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn psido(args: &[&str], config: Option<&Path>, out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_psido"));
    cmd.args(args).arg("--out").arg(out).arg("--quiet");
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn recover_reports_a_passing_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"T": "quantize:weierstrass_times_bracket(0.5,1,6)", "m": 1}"#);
    let out = dir.path().join("run");
    let o = psido(&["recover", "--grid", "128,4pi"], Some(&cfg), &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let d = json(&out.join("diagnostics.json"));
    let replay = d["replay_error"].as_f64().unwrap();
    assert!(replay <= 1e-2, "replay {replay}");
    for f in ["symbol.bin", "window.bin", "class_report.csv", "effective_config.json", "metadata.json"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
}

#[test]
fn zygmund_norm_of_a_mode() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"space": "zygmund", "f": "cos32", "tau": 0.5}"#);
    let out = dir.path().join("run");
    let o = psido(&["norm", "--grid", "128,pi"], Some(&cfg), &out);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&out.join("report.json"))["value"].as_f64().unwrap();
    assert!((v - 32f64.sqrt()).abs() <= 1e-2 * 32f64.sqrt(), "{v}");
}

#[test]
fn selftest_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = psido(&["selftest"], None, &out);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&out.join("report.json"))["pass"], Value::Bool(true));
}

#[test]
fn bad_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"space": "zygmund", "f": "cos32", "tau": "half"}"#);
    let o = psido(&["norm"], Some(&cfg), &dir.path().join("run"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau"));
    let cfg = write_config(dir.path(), r#"{"space": "zygmund", "f": "cos32", "sapce": 1}"#);
    let o = psido(&["norm"], Some(&cfg), &dir.path().join("run"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sapce"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"operator": "quantize:sin_coeff(0)", "order": 0, "budget": 1}"#);
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert_eq!(psido(&["membership", "--grid", "32,4pi"], Some(&cfg), &a).status.code(), Some(0));
    assert_eq!(psido(&["membership", "--grid", "32,4pi"], Some(&cfg), &b).status.code(), Some(0));
    let first = std::fs::read(a.join("report.json")).unwrap();
    assert_eq!(first, std::fs::read(b.join("report.json")).unwrap());
    // the effective config replays the run without any flags
    let o = psido(&["membership"], Some(&a.join("effective_config.json")), &c);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(first, std::fs::read(c.join("report.json")).unwrap());
}
