use std::process::Command;

fn drumkit(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_drumkit")).args(args).env("DRUMKIT_THREADS", "2").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn list_prints_the_catalog() {
    let (code, out) = drumkit(&["list"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 18);
    let (code, out) = drumkit(&["list", "7_1", "--json"]);
    assert_eq!(code, 0);
    let row: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(row["kernel"], "×^23");
}

#[test]
fn exit_codes() {
    assert_eq!(drumkit(&["verify", "nope"]).0, 2);
    assert_eq!(drumkit(&["verify", "7_1"]).0, 0);
    assert_eq!(drumkit(&["spectrum", "13_6", "--tri", "equilateral", "-r", "1"]).0, 1);
    assert_eq!(drumkit(&["transplant", "7_1", "--seed", "0"]).0, 2);
    assert_eq!(drumkit(&["spectrum", "7_1", "-N", "0"]).0, 2);
}

#[test]
fn transplant_prints_the_seed_row() {
    let (code, out) = drumkit(&["transplant", "7_1"]);
    assert_eq!(code, 0);
    assert!(out.contains("1 + 2 + 4"), "{out}");
    let (code, out) = drumkit(&["transplant", "21_1", "--complement", "--bc", "neumann", "--json"]);
    assert_eq!(code, 0);
    let t: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(t["intertwines"], true);
}

#[test]
fn realize_writes_svg_and_reports_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("7_1.svg");
    let (code, out) = drumkit(&["realize", "7_1", "-o", svg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["congruent"], false);
    assert_eq!(r["left"]["embedding"], "embedded");
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn cone_manifolds_are_refused_unless_allowed() {
    let tri = "1.0,1.0,1.1415926535897931";
    assert_eq!(drumkit(&["realize", "21_1", "--tri", tri]).0, 1);
    let (code, out) = drumkit(&["spectrum", "21_1", "--tri", tri, "--allow-cone"]);
    assert_eq!(code, 0);
    let r: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["status"], "cone_manifold");
    assert!(!r["defects"].as_array().unwrap().is_empty());
}

#[test]
fn spectrum_reads_config_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let report = dir.path().join("report.json");
    std::fs::write(&cfg, "# small run\npair = 7_1\nr = 1\nn = 6\nbc = neumann\n").unwrap();
    let (code, _) = drumkit(&["spectrum", "--config", cfg.to_str().unwrap(), "-r", "2", "-o", report.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["level"], 2);
    assert_eq!(r["bc"], "neumann");
    assert_eq!(r["eigenvalues"].as_array().unwrap().len(), 6);
    assert!(r["max_rel_gap"].as_f64().unwrap() < 1e-8);
}

#[test]
fn homophonic_compares_point_measures() {
    let (code, out) = drumkit(&["homophonic", "21_1", "-r", "2"]);
    assert_eq!(code, 0, "{out}");
    let r: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["clusters_compared"], 10);
    assert!(r["max_measure_rel_diff"].as_f64().unwrap() < 1e-6);
}
