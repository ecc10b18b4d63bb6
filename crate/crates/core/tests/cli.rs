use std::process::{Command, Output};

fn cremona(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cremona")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_names_every_builtin() {
    let o = cremona(&["list"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout(&o).lines().map(|l| l.split('\t').next().unwrap().to_string()).collect();
    assert_eq!(names, ["sextic-ruled", "bordiga", "dp6", "family-open", "family-closed"]);
}

#[test]
fn check_all_passes() {
    let o = cremona(&["check-all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 5);
    assert!(out.contains("sextic-ruled: PASS (NOT_CREMONA_EQUIVALENT_TO_PLANE)"));
    assert!(out.contains("family-closed: PASS (CE_TO_PLANE_NOT_CLOSED)"));
}

#[test]
fn run_prints_markdown_transcript() {
    let o = cremona(&["run", "sextic-ruled"]);
    assert!(o.status.success());
    let md = stdout(&o);
    assert!(md.starts_with("# Scenario `sextic-ruled`: PASS"));
    assert!(md.contains("e = -2 - b2"));
    assert!(md.contains("not by searching over Cremona transformations"));
}

#[test]
fn run_writes_json_and_markdown_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let md = dir.path().join("r.md");
    let o = cremona(&["run", "dp6", "--json", json.to_str().unwrap(), "--md", md.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "dp6: PASS (CE_TO_PLANE_VIA_FIBRATION)");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["overall"], "PASS");
    assert_eq!(v["computed"]["second_ray.kind"], "FIBRATION");
    assert!(std::fs::read_to_string(&md).unwrap().contains("## Checks"));
}

#[test]
fn failing_scenario_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("perturbed.json");
    let mut v: serde_json::Value =
        serde_json::from_str(cremona_core::scenario::builtin_source("sextic-ruled").unwrap()).unwrap();
    v["projection"]["deg_gamma"] = 11.into();
    std::fs::write(&path, v.to_string()).unwrap();
    let o = cremona(&["run", path.to_str().unwrap(), "--md", dir.path().join("x.md").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn bad_input_exits_two() {
    let o = cremona(&["run", "no-such-scenario"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown scenario"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, r#"{"name": "x", "projection": {"curves": 3}}"#).unwrap();
    let o = cremona(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("projection"));
}
