use std::process::{Command, Output};

use serde_json::Value;

fn mfnear(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfnear"))
        .args(args)
        .env_remove("MFNEAR_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = mfnear(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(v["schema_version"], 1);
    v
}

fn quantity<'a>(v: &'a Value, name: &str) -> &'a Value {
    v["result"][0]["quantities"]
        .as_array()
        .unwrap()
        .iter()
        .find(|q| q["name"] == name)
        .unwrap_or_else(|| panic!("no {name}"))
}

fn cell<'a>(v: &'a Value, two_n: u64, column: &str) -> &'a str {
    v["result"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["two_n"] == two_n && r["column"] == column)
        .and_then(|r| r["display"].as_str())
        .unwrap()
}

#[test]
fn formulas_report_bounds_and_sizes() {
    let v = json(&["formulas", "--two-n", "8"]);
    let lower = quantity(&v, "mfc_lower")["log2"].as_f64().unwrap();
    let upper = quantity(&v, "mfc_upper")["log2"].as_f64().unwrap();
    assert_eq!(format!("{lower:.6} / {upper:.6}"), "77.864341 / 77.865447");
    assert_eq!(quantity(&json(&["formulas", "--two-n", "4"]), "mfsp")["exact"], "896");
    assert_eq!(quantity(&json(&["formulas", "--two-n", "2"]), "near_mf")["exact"], "0");
}

#[test]
fn tables_render_printed_cells() {
    assert_eq!(cell(&json(&["table", "3"]), 12, "expected_m"), "1 + 2^-133.377320");
    assert_eq!(cell(&json(&["table", "1"]), 24, "tail"), "5.7338671451801089");
    assert_eq!(cell(&json(&["table", "2"]), 6, "mf"), "2^23.299");
    assert_eq!(cell(&json(&["table", "2"]), 8, "bent"), "external");
    let csv = mfnear(&["table", "4", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("table,two_n,column,display,exact,log2\n"));
    assert!(text.contains("4,6,lower,< 0,"));
}

#[test]
fn near_count_list_and_realize() {
    let v = json(&["near", "count", "--pi", "[0,1,2,3]", "--phi", "0000"]);
    assert_eq!(v["result"]["count"], 60);
    let hex = v["result"]["function"].as_str().unwrap().to_string();
    assert_eq!(json(&["near", "count", "--hex", &hex])["result"]["count"], 60);
    let crit = json(&["near", "realize", "--pi", "[0,1,2,3]"]);
    let brute = json(&["near", "realize", "--pi", "[0,1,2,3]", "--brute"]);
    assert_eq!(crit["result"]["tables"], brute["result"]["tables"]);
    assert_eq!(crit["result"]["tables"].as_array().unwrap().len(), 60);
    let list = json(&["near", "list", "--pi", "[0,1,2,3]"]);
    assert_eq!(list["result"]["witnesses"].as_array().unwrap().len(), 60);
}

#[test]
fn parents_of_a_dimension_two_witness() {
    let v = json(&["near", "list", "--pi", "[0,1,2,3,4,5,6,7]", "--phi", "01101001", "--parents"]);
    assert_eq!(v["result"]["witness"]["dim"], 2);
    assert_eq!(v["result"]["parents"].as_array().unwrap().len(), 24);
}

#[test]
fn bad_input_is_a_usage_error() {
    for args in [
        &["near", "count", "--pi", "[0,0,1,2]"][..],
        &["near", "count", "--hex", "zz"],
        &["table", "6"],
        &["sample", "near-average", "--two-n", "8", "--trials", "0"],
        &["near", "count", "--pi", "[0,1,2,3]", "--phi", "012"],
    ] {
        assert_eq!(mfnear(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_is_reproducible() {
    let args = ["verify", "--suite", "all", "--seed", "1", "--trials", "5"];
    let a = mfnear(&args);
    let b = mfnear(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 1);
    assert_eq!(v["result"]["pass"], true);
    assert!(v["result"]["outcomes"][0].get("wall_ms").is_none());
    let timed = json(&["verify", "--suite", "sums", "--seed", "1", "--timings"]);
    assert!(timed["result"]["outcomes"][0].get("wall_ms").is_some());
}

#[test]
fn verify_census_text() {
    let out = mfnear(&["verify", "--suite", "census", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[PASS] |MF_4|, |near(MF_4)|, |MF_4^#SP| by dedup census: 384 / 512 / 896"));
}

#[test]
fn samples_cover_their_targets() {
    for seed in 1..=5 {
        let v = json(&["sample", "near-average", "--two-n", "8", "--trials", "1000", "--seed", &seed.to_string()]);
        assert!(v["result"]["z"].as_f64().unwrap().abs() <= 3.0, "seed {seed}");
    }
    let v = json(&["sample", "m-size", "--two-n", "6", "--trials", "10000", "--seed", "3"]);
    let est = &v["result"]["estimate"];
    let (mean, se) = (est["mean"].as_f64().unwrap(), est["std_error"].as_f64().unwrap());
    assert!((mean - 8.6).abs() <= 3.0 * se, "{mean} +- {se}");
}

#[test]
fn random_seed_is_recorded() {
    let v = json(&["sample", "m-size", "--two-n", "4", "--trials", "10"]);
    assert!(v["seed"].is_u64());
}

#[test]
fn output_file_and_directory() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = mfnear(&["table", "5", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(&path).unwrap().contains("16,log2_beta,1117.150429"));
    let out = Command::new(env!("CARGO_BIN_EXE_mfnear"))
        .args(["table", "2"])
        .env("MFNEAR_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success() && out.stdout.is_empty());
    let written = std::fs::read_to_string(dir.path().join("table-2.json")).unwrap();
    assert!(written.contains("\"schema_version\": 1"));
}
