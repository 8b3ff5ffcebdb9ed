use std::fs;
use std::process::Command;

fn psbench() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_psbench"));
    cmd.env("PSBENCH_THREADS", "1");
    cmd
}

#[test]
fn bad_config_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "bins = 1000\n").unwrap();
    let out = psbench().arg("orbit").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bins"));
}

#[test]
fn unknown_preset_and_bad_radius_are_config_errors() {
    for args in [["--preset", "hexagon"], ["--radius", "-1"]] {
        let out = psbench().arg("delta").args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "preset = \"modular\"\nradius = 20.0\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = psbench()
        .args(["orbit", "--preset", "cyclic_axial(2)", "--radius", "10"])
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let rows = fs::read_to_string(out_dir.join("orbit_ball.csv")).unwrap();
    assert_eq!(rows.lines().count(), 12);
    let printed = String::from_utf8(out.stdout).unwrap();
    assert!(printed.contains("orbit_ball.csv") && printed.contains("annuli.csv"));
}

#[test]
fn delta_report_on_cyclic_has_zero_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let out = psbench()
        .args(["delta", "--preset", "cyclic_axial(2)", "--radius", "12"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("poincare_report.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["delta_counting"]["value"], 0.0);
    // at s = 0 every term is 1
    assert_eq!(doc["divergence"]["verdict"], "diverging");
}

#[test]
fn classify_writes_report_and_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = psbench()
        .args(["classify", "--preset", "schottky_perp(3)", "--radius", "10", "--seed", "3"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("conservativity_report.json")).unwrap()).unwrap();
    assert!(doc["verdict"].is_string());
    let records = fs::read_to_string(dir.path().join("classification_records.csv")).unwrap();
    assert_eq!(records.lines().count(), 51);
}
