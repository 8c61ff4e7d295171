//! Shape of summary.json and the CSV headers.

use std::fs;

use chaoslab::experiment::{run, ExperimentConfig, RunOptions, SCHEMA_VERSION};
use serde_json::Value;

const R3: &str = r#"seed = 11
replications = 2000
grid = [100, 200, 400, 800, 1600]

[experiment]
kind = "subgraph_regimes"
regime = { variant = "r3", c = 1.0 }
d = 2
"#;

#[test]
fn summary_json_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_toml(R3).unwrap();
    let out = tmp.path().join("r3");
    let report = run(&cfg, &out, RunOptions::default()).unwrap();
    assert_eq!(report.out_dir, out);
    let v: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(v["schema_version"], SCHEMA_VERSION);
    assert_eq!(v["kind"], "subgraph_regimes");
    for f in
        ["provenance", "points", "variance_slope", "w1_series", "fourth_moment_series", "w1_rate", "extra", "findings", "bands", "passed"]
    {
        assert!(v.get(f).is_some(), "missing {f}");
    }
    let prov = &v["provenance"];
    assert_eq!(prov["seed"], 11);
    assert_eq!(prov["config_hash"].as_str().unwrap().len(), 64);
    let slope = &v["variance_slope"];
    for f in ["grid", "slope", "intercept", "r_squared", "slope_se"] {
        assert!(slope.get(f).is_some(), "variance_slope.{f}");
    }
    assert_eq!(v["w1_series"].as_array().unwrap().len(), 5);
    let p = &v["points"][0];
    for f in ["scale", "t", "mean", "variance", "variance_se", "w1", "fourth_gap", "fourth_gap_se", "predicted_scale"] {
        assert!(p.get(f).is_some(), "points[].{f}");
    }
    for b in v["bands"].as_array().unwrap() {
        for f in ["name", "value", "lo", "hi", "passed"] {
            assert!(b.get(f).is_some(), "bands[].{f}");
        }
    }
    let header = |name: &str| fs::read_to_string(out.join(name)).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header("summary.csv"), "n_or_lambda,t,mean,variance,variance_se,w1,fourth_gap,fourth_gap_se");
    assert_eq!(header("plot_variance.csv"), "x,y,y_err");
    assert!(out.join("config.toml").exists());
    let reread = ExperimentConfig::from_path(&out.join("config.toml")).unwrap();
    assert_eq!(reread, cfg);
}

#[test]
fn partial_directory_is_cleaned_on_success() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_toml(&R3.replace("[100, 200, 400, 800, 1600]", "[50, 60, 70, 80]").replace("2000", "50")).unwrap();
    let out = tmp.path().join("x");
    run(&cfg, &out, RunOptions::default()).unwrap();
    let leftovers: Vec<_> = fs::read_dir(tmp.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers, vec![std::ffi::OsString::from("x")]);
}
