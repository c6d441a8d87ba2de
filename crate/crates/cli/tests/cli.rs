use std::process::Command;

fn meltsph() -> Command {
    Command::new(env!("CARGO_BIN_EXE_meltsph"))
}

const SCENARIOS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/scenarios");

#[test]
fn list_names_every_benchmark() {
    let out = meltsph().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for n in ["static_droplet", "migration", "oscillation", "melt2d", "keyhole2d", "point3d"] {
        assert!(text.lines().any(|l| l == n), "{n}");
    }
}

#[test]
fn run_writes_manifest_snapshot_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out = meltsph()
        .args(["--sequential", "run", &format!("{SCENARIOS}/static_droplet.cfg"), "--max-steps", "2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["steps"], 2);
    assert!(dir.path().join("manifest.toml").exists());
    let first = dir.path().join("snapshot_00000.csv");
    let text = std::fs::read_to_string(first).unwrap();
    assert_eq!(text.lines().count(), 1 + 4096 + 384);
    assert!(text.starts_with("id,phase,x,y,u,v,rho,p,T,delta_lg,kappa\n"));
}

#[test]
fn thread_count_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = meltsph()
        .env("MELTSPH_THREADS", "2")
        .args(["run", &format!("{SCENARIOS}/static_droplet.cfg"), "--max-steps", "1", "--resolution-scale", "2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("2 thread(s)") && err.contains("1216 particles"), "{err}");
}

#[test]
fn bad_scenario_exits_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.cfg");
    std::fs::write(&path, "").unwrap();
    let out = meltsph().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing required sections"), "{err}");
}

#[test]
fn gradlab_prints_table_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.toml");
    std::fs::write(&path, "cells = 24\ntilt = 20.0\noffset = 1700.0\n").unwrap();
    let out = meltsph().arg("gradlab").arg(&path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("asymmetric") && table.contains("csph"), "{table}");
    let out = meltsph().arg("gradlab").arg(&path).arg("--json").output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["rows"].as_array().is_some_and(|r| !r.is_empty()));
}
