use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn sprawl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sprawl")).args(args).output().unwrap()
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sprawl-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn train_tree(dir: &Path) -> String {
    let out = dir.join("tree.json").to_string_lossy().into_owned();
    let o = sprawl(&[
        "train", "--data", &fixture("ny_2000.csv"), &fixture("ny_2010.csv"),
        "--binning", &fixture("ny_binning.json"), "--units", &fixture("ny_units.json"),
        "--method", "tree", "--holdout", "0", "--out", &out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        String::from_utf8_lossy(&o.stdout),
        "REPTree\n=====\nPopulationDensity < 420 : N (85/0)\nPopulationDensity >= 420 : Y (39/0)\nSize of the tree : 3\n"
    );
    out
}

#[test]
fn predict_and_impact() {
    let dir = scratch("query");
    let bundle = train_tree(&dir);

    let o = sprawl(&["predict", "--bundle", &bundle, "PopulationDensity=54545"]);
    assert!(o.status.success());
    let p: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(p["label"], "Y");
    assert_eq!(p["explanation"][0]["text"], "PopulationDensity is at least 420 per square mile");

    let o = sprawl(&["impact", "--bundle", &bundle, "HousingUnits", "ElectricHeating", "HousingUnits=76767"]);
    assert!(o.status.success());
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["headline"], "less than 20,000");

    let o = sprawl(&["impact", "--bundle", &bundle, "HousingUnits", "ElectricHeating", "Income=3"]);
    assert!(!o.status.success());
    let o = sprawl(&["predict", "--bundle", &bundle, "Bogus=1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown attribute `Bogus`"));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn export_map_and_mine_rules_json() {
    let dir = scratch("map");
    let out = dir.join("2000.geojson").to_string_lossy().into_owned();
    let o = sprawl(&[
        "export-map", "--year", "2000", "--shp", &fixture("ny_counties.shp"),
        "--labels", &fixture("ny_2000.csv"), "--out", &out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let features = doc["features"].as_array().unwrap();
    assert_eq!(features.len(), 62);
    let sprawl_count = features.iter().filter(|f| f["properties"]["sprawl"] == "Y").count();
    assert_eq!(sprawl_count, 17);

    let tx = dir.join("tx.txt");
    std::fs::write(&tx, "A B C\nA B\nA C\nB C\nA B C\n").unwrap();
    let json = dir.join("rules.json").to_string_lossy().into_owned();
    let o = sprawl(&[
        "mine-rules", "--transactions", &tx.to_string_lossy(), "--json", &json,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    let rules: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(rules.as_array().unwrap().len(), text.lines().count());
    assert!(text.lines().any(|l| l == "A B -> C" || l == "C -> A B" || l == "A -> B"));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn missing_data_is_an_error() {
    let o = sprawl(&["mine-rules"]);
    assert!(!o.status.success());
    let o = sprawl(&["train", "--data", "/nonexistent.csv", "--out", "/tmp/x.json"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent.csv"));
}
