use std::path::Path;
use std::process::{Command, Output};

fn isoprofile(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoprofile"))
        .args(args)
        .current_dir(dir)
        .env_remove("ISOPROFILE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn disk_profile_csv_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = isoprofile(
        &["profile", "--surface", "hyperbolic", "--kind", "disk", "--vmin", "0.1", "--vmax", "10", "--points", "50", "--out", "p.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with('#'));
    assert_eq!(lines[1], "v,I,kind,r,candidate,candidate_param");
    assert_eq!(lines.len(), 52);
}

#[test]
fn placement_scenario_passes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("scen2.json"),
        r#"{"surface": {"catalog": "plane"}, "E": [[0.0, 1.0]], "B": 2.0, "D": 4.0, "r0": 1.0}"#,
    )
    .unwrap();
    let out = isoprofile(
        &["placement", "--config", "scen2.json", "--r", "0.5", "--samples", "100000", "--seed", "7"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["pass"], true);
    let lambda = v["result"]["lambda"].as_f64().unwrap();
    assert!((lambda - 3.0 * std::f64::consts::PI / 64.0).abs() < 1e-11);
}

#[test]
fn remark_demo_reports_one_sided_continuity() {
    let dir = tempfile::tempdir().unwrap();
    let out = isoprofile(&["limits", "--demo", "remark"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["right"]["pass"], true);
    assert_eq!(v["result"]["left"]["pass"], false);
    assert_eq!(v["result"]["left"]["gaps"].as_array().unwrap().last().unwrap(), 1.0);
}

#[test]
fn matrix_limits_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("# x then f_i(x) = x + 1/i\n0,0.25,0.5,0.75,1\n");
    for i in 1..=6 {
        let row: Vec<String> = [0.0, 0.25, 0.5, 0.75, 1.0].iter().map(|x| format!("{}", x + 1.0 / i as f64)).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(dir.path().join("fam.csv"), text).unwrap();
    let out = isoprofile(&["limits", "--matrix", "fam.csv", "--x0", "0.5", "--tail-tol", "0.1"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["result"]["continuity"]["right"]["pass"], true);
    assert!(v["result"]["limit"]["unsettled"].as_array().unwrap().is_empty());
}

#[test]
fn non_monotone_matrix_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "0,1\n1,0\n").unwrap();
    let out = isoprofile(&["limits", "--matrix", "bad.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.json"), "{ not json").unwrap();
    for args in [
        vec!["profile", "--surface", "plane", "--vmin", "1", "--vmax", "2", "--bogus"],
        vec!["placement", "--config", "broken.json", "--r", "0.5", "--seed", "1"],
        vec!["placement", "--config", "missing.json", "--r", "0.5", "--seed", "1"],
        vec!["surface", "--surface", "torus"],
        vec!["spaceform", "--delta", "1", "--rmax", "-2"],
        vec!["exhaustion", "--surface", "plane"],
    ] {
        let out = isoprofile(&args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn failed_verification_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = isoprofile(&["exhaustion", "--surface", "hyperbolic", "--seed", "3", "--geodesics", "10"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["result"]["pass"], false);
    let out = isoprofile(&["exhaustion", "--surface", "cigar", "--seed", "3", "--geodesics", "10"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["profile", "--surface", "cigar", "--kind", "sublevel", "--rho", "1", "--vmin", "0.5", "--vmax", "2", "--points", "4"];
    let a = isoprofile(&args, dir.path());
    let b = isoprofile(&args, dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = ["exhaustion", "--surface", "cigar", "--seed", "5", "--geodesics", "5"];
    assert_eq!(isoprofile(&args, dir.path()).stdout, isoprofile(&args, dir.path()).stdout);
}

#[test]
fn spaceform_and_surface_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = isoprofile(&["spaceform", "--delta", "-1", "--rmax", "1", "--points", "4"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    // r = 1: V = 2π(cosh 1 - 1), A = 2π sinh 1.
    assert!(last.starts_with("1,3.41227626528,7.38400687288,"), "{last}");

    let out = isoprofile(&["surface", "--surface", "flare", "--tmax", "2", "--points", "2", "--format", "json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let row = &v["result"][1];
    assert_eq!(row["t"], 2.0);
    // φ = t + t³e^{t²}, so K(2) = -φ''/φ = -252e⁴ / (2 + 8e⁴).
    let e4 = 4f64.exp();
    let k = -252.0 * e4 / (2.0 + 8.0 * e4);
    assert!((row["K"].as_f64().unwrap() - k).abs() < 1e-9 * k.abs());
}

#[test]
fn out_dir_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_isoprofile"))
        .args(["limits", "--demo", "remark", "--out", "remark.json"])
        .env("ISOPROFILE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("remark.json").exists());
}
