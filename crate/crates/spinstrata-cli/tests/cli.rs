use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinstrata")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_kind(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(2), "{args:?}");
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn census_of_genus_two() {
    let v = json(&["census", "--genus", "2", "--r", "2"]);
    assert_eq!((v["total"].as_u64(), v["even"].as_u64(), v["odd"].as_u64()), (Some(16), Some(10), Some(6)));
}

#[test]
fn component_census_and_exclusions() {
    let v = json(&["census", "--kappa", "2,2,2,2"]);
    assert_eq!(v["agrees_with_census"], true);
    assert_eq!(error_kind(&["census", "--kappa", "6"]), "unsupported");
}

#[test]
fn prototype_summary() {
    let v = json(&["prototype", "--kappa", "2,2", "--spin", "even"]);
    assert_eq!(v["profile"], serde_json::json!([2, 2]));
    assert_eq!(v["arf"], 0);
    let dot = run(&["prototype", "--kappa", "2,2", "--spin", "even", "--out", "dot"]);
    assert!(String::from_utf8_lossy(&dot.stdout).starts_with("graph"));
}

#[test]
fn origami_file_round_trip() {
    let out = run(&["prototype", "--kappa", "3,3"]);
    let dir = std::env::temp_dir().join(format!("spinstrata-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("proto.json");
    std::fs::write(&file, &out.stdout).unwrap();
    let v = json(&["prototype", "--origami-file", file.to_str().unwrap()]);
    assert_eq!(v["profile"], serde_json::json!([3, 3]));
    let s = json(&["shear", "--origami-file", file.to_str().unwrap()]);
    assert!(s["shears"].as_array().unwrap().iter().all(|x| x["isomorphic"] == true));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn orbit_is_seeded() {
    let a = json(&["orbit", "--genus", "4", "--r", "2", "--seed", "3"]);
    let b = json(&["orbit", "--genus", "4", "--r", "2", "--seed", "3"]);
    assert_eq!(a, b);
    assert_eq!(a["orbit_sizes"], serde_json::json!([136, 120]));
}

#[test]
fn euclid_and_verify() {
    let t = json(&["euclid", "--kappa", "5,7"]);
    assert_eq!(t["final_r"], 1);
    assert_eq!(t["all_verified"], true);
    let c = t["certificates"].as_array().unwrap().iter().find(|c| !c["word"].as_array().unwrap().is_empty()).unwrap();
    let word = c["word"].to_string();
    let (src, tgt) = (c["source"].as_str().unwrap(), c["target"].as_str().unwrap());
    let ok = json(&["verify", "--kappa", "5,7", "--word", &word, "--source", src, "--target", tgt]);
    assert_eq!(ok["passed"], true);
    let no = json(&["verify", "--kappa", "5,7", "--word", "[]", "--source", src, "--target", tgt]);
    assert_eq!(no["passed"], false);
}

#[test]
fn salter_and_shear() {
    assert_eq!(json(&["salter-check", "--kappa", "1,1,1,1,1,1,1,1"])["passed"], true);
    let s = json(&["shear", "--kappa", "2,2,2", "--spin", "odd"]);
    assert!(s["shears"].as_array().unwrap().iter().all(|x| x["isomorphic"] == true));
}

#[test]
fn errors_are_json() {
    assert_eq!(error_kind(&["prototype", "--kappa", "x"]), "usage");
    assert_eq!(error_kind(&["prototype", "--kappa", "2,2"]), "invalid-input");
    assert_eq!(error_kind(&["euclid", "--kappa", "3,3"]), "regime");
    assert_eq!(error_kind(&["arf", "--values", "1,1", "--r", "3"]), "unsupported");
    assert_eq!(error_kind(&["arf", "--values", "1,1,1", "--r", "2"]), "invalid-input");
}
