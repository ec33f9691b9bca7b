use k3lat::catalog::{self, Name};
use k3lat::serial::{self, RelativeLatticeJson};
use std::process::{Command, Output};

fn k3lat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3lat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn classify_prints_the_glue() {
    let o = k3lat(&["classify", "--side", "X", "--degree", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("g = k1+k3+k7+k9"));
    let o = k3lat(&["classify", "--side", "y", "--degree", "9", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["g"], "m11+2m21+m12+2m22+m13+2m23");
}

#[test]
fn quotient_and_tower() {
    let o = k3lat(&["quotient-ns", "--d", "1", "--variant", "plain"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("PrimedY(3)") && s.contains("H^2 = 6"), "{s}");
    let o = k3lat(&["tower", "--d", "1", "--height", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let squares: Vec<i64> = v.as_array().unwrap().iter().map(|r| r["square"].as_i64().unwrap()).collect();
    assert_eq!(squares, vec![6, 18, 54]);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(k3lat(&["verify-all", "--dmax", "zero"]).status.code(), Some(2));
    assert_eq!(k3lat(&["verify-all", "--only", "no-such-check"]).status.code(), Some(2));
    assert_eq!(k3lat(&["quotient-ns", "--d", "2", "--variant", "primed"]).status.code(), Some(2));
    assert_eq!(k3lat(&["catalog", "show", "E7"]).status.code(), Some(2));
    assert_eq!(k3lat(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn catalog_json_round_trips() {
    let o = k3lat(&["catalog", "show", "K12", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let j: RelativeLatticeJson = serde_json::from_slice(&o.stdout).unwrap();
    let back = serial::relative_from_json(&j).unwrap();
    assert_eq!(back, catalog::build(Name::K12).unwrap().lattice);
    let o = k3lat(&["catalog", "list", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), Name::listing().len());
}

#[test]
fn disc_and_surface() {
    let o = k3lat(&["disc", "E6", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["divisors"], serde_json::json!([3]));
    assert_eq!(v["gauss_residue_mod_8"], 2);
    let o = k3lat(&["example-surface", "verify", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ok"], true);
}

#[test]
fn orbits_of_m() {
    let o = k3lat(&["orbits", "--lattice", "M", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "EqualsLevelSets");
    assert_eq!(v["orbit_sizes"], serde_json::json!([20, 30, 30]));
}

#[test]
fn verify_selected_checks_writes_json() {
    let path = std::env::temp_dir().join(format!("k3lat-report-{}.json", std::process::id()));
    let o = k3lat(&[
        "verify-all",
        "--only",
        "k3-lattice-glued,family-classification,discriminant-orbits",
        "--dmax",
        "9",
        "--strict",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    let checks = v["checks"].as_array().unwrap();
    let ids: Vec<&str> = checks.iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["k3-lattice-glued", "family-classification", "discriminant-orbits"]);
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    assert_eq!(checks[1]["witness"]["dmax"], 9);
}

#[test]
fn generator_file_is_accepted() {
    let path = std::env::temp_dir().join(format!("k3lat-gens-{}.json", std::process::id()));
    let neg: Vec<Vec<i64>> = (0..12).map(|i| (0..12).map(|j| if i == j { -1 } else { 0 }).collect()).collect();
    std::fs::write(&path, serde_json::json!([{ "lattice": "M", "matrix": neg, "name": "minus" }]).to_string()).unwrap();
    let o = k3lat(&["orbits", "--lattice", "M", "--gens", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&path, r#"[{"lattice": "M", "matrix": [[2]]}]"#).unwrap();
    let o = k3lat(&["orbits", "--lattice", "M", "--gens", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(2));
}
