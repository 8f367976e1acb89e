use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use wgossip::fixtures;
use wgossip::network::serialize_network;

fn wgossip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgossip"))
        .args(args)
        .env_remove("WG_REPLICAS")
        .output()
        .expect("binary runs")
}

fn write_net(dir: &Path, name: &str, net: &wgossip::AcquaintanceNetwork) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serialize_network(net)).unwrap();
    path.to_str().unwrap().to_string()
}

fn close(v: &Value, want: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() < 1e-11
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_net(dir.path(), "b.json", &fixtures::net_b());
    assert_eq!(wgossip(&["validate", "--network", &good]).status.code(), Some(0));

    let mut bad = fixtures::cycle(4);
    bad.p[(0, 1)] = 0.4; // row 0 now sums to 0.9
    let bad = write_net(dir.path(), "bad.json", &bad);
    let out = wgossip(&["validate", "--network", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("sum to 0.9"));

    let out = wgossip(&["validate", "--network", &bad, "--normalize"]);
    assert_eq!(out.status.code(), Some(0));

    let missing = dir.path().join("nope.json");
    assert_eq!(wgossip(&["validate", "--network", missing.to_str().unwrap()]).status.code(), Some(1));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"n\": 2}").unwrap();
    let out = wgossip(&["validate", "--network", garbage.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("delta"));
}

#[test]
fn simulate_net_a_and_budget_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_net(dir.path(), "a.json", &fixtures::net_a());
    let summary = dir.path().join("summary.json");
    let trace = dir.path().join("trace.csv");
    let out = wgossip(&[
        "simulate", "--network", &a, "--replicas", "20",
        "--out", summary.to_str().unwrap(), "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("0.500000000000"), "{stdout}");
    assert!(stdout.contains("20/20"));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(doc["simulation"]["mean"], Value::from(0.5));
    assert_eq!(doc["simulation"]["std_error"], Value::from(0.0));
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(csv.lines().next(), Some("slot,node_0,node_1,spread"));
    assert_eq!(csv.lines().last(), Some("1,0.5,0.5,0"));

    let ring = write_net(dir.path(), "ring.json", &fixtures::cycle(10));
    let out = wgossip(&["simulate", "--network", &ring, "--replicas", "5", "--max-slots", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0/5"));
}

#[test]
fn simulate_net_b_matches_expected_consensus() {
    let dir = tempfile::tempdir().unwrap();
    let b = write_net(dir.path(), "b.json", &fixtures::net_b());
    let summary = dir.path().join("s.json");
    let out = wgossip(&["simulate", "--network", &b, "--replicas", "10000", "--seed", "0", "--out", summary.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    let mean = doc["simulation"]["mean"].as_f64().unwrap();
    let se = doc["simulation"]["std_error"].as_f64().unwrap();
    assert!((mean - 2.0 / 3.0).abs() <= 3.0 * se);
}

#[test]
fn analyze_net_b_report() {
    let dir = tempfile::tempdir().unwrap();
    let b = write_net(dir.path(), "b.json", &fixtures::net_b());
    let out = wgossip(&["analyze", "--network", &b, "--replicas", "200"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();

    for key in ["network", "spectral", "stationary", "simulation", "impact", "verdicts", "config", "version"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    let pi = &doc["stationary"]["pi"];
    assert!(close(&pi[0], 1.0 / 3.0) && close(&pi[1], 2.0 / 3.0));
    let s = &doc["spectral"];
    assert!(close(&s["performance"], 1.0 / 6.0));
    assert!(close(&s["bound_linf"], 0.25));
    assert!(close(&s["bound_l2"], 0.5));
    assert!(close(&s["gap"], 1.0));
    assert_eq!(s["mixing_class"], "fast");
    assert!(close(&doc["impact"]["conductance_bound"], 1.0 + 2f64.ln()));
    let nodes = doc["impact"]["nodes"].as_array().unwrap();
    assert!(close(&nodes[0]["exact"], -1.0 / 6.0) && close(&nodes[1]["exact"], 1.0 / 6.0));
    assert_eq!(doc["impact"]["bridge"]["mismatch"], false);
    assert_eq!(doc["verdicts"]["incentive_clients"], serde_json::json!([1]));
    assert_eq!(doc["version"], "wgossip-report/1");
}

#[test]
fn analyze_without_influence() {
    let dir = tempfile::tempdir().unwrap();
    let quiet = write_net(dir.path(), "q.json", &fixtures::without_influence(&fixtures::barbell(3, 3, Some(1.0))));
    let out = wgossip(&["analyze", "--network", &quiet, "--replicas", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    for v in doc["stationary"]["pi"].as_array().unwrap() {
        assert!(close(v, 1.0 / 6.0));
    }
    assert!(close(&doc["spectral"]["performance"], 0.0));
    assert!(close(&doc["spectral"]["bound_linf"], 0.0));
    assert!(close(&doc["spectral"]["bound_l2"], 0.0));
    assert_eq!(doc["spectral"]["mixing_class"], "slow");
    for node in doc["impact"]["nodes"].as_array().unwrap() {
        assert!(close(&node["exact"], 0.0));
        assert_eq!(node["tier"], "review");
    }
    assert_eq!(doc["simulation"]["skipped"], true);
}

#[test]
fn analyze_barbell_bridge_section_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_net(dir.path(), "bar.json", &fixtures::barbell(3, 3, Some(0.8)));
    let out = wgossip(&["analyze", "--network", &net, "--replicas", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let bridge = &doc["impact"]["bridge"];
    assert_eq!(bridge["edge"], serde_json::json!([2, 3]));
    let nodes = doc["impact"]["nodes"].as_array().unwrap();
    for side in [[0, 1, 2], [3, 4, 5]] {
        for k in side {
            assert_eq!(nodes[k]["exact"], nodes[side[0]]["exact"]);
        }
    }

    let csv_path = dir.path().join("impact.csv");
    let out = wgossip(&["analyze", "--network", &net, "--replicas", "0", "--format", "csv", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(csv_path).unwrap();
    assert_eq!(csv.lines().next(), Some("node,exact,thm5,thm5_residual,thm6,thm7_bound,rank,tier"));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn conductance_skip_omits_bound() {
    let dir = tempfile::tempdir().unwrap();
    let b = write_net(dir.path(), "b.json", &fixtures::net_b());
    let out = wgossip(&["analyze", "--network", &b, "--replicas", "0", "--conductance", "skip"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["spectral"]["conductance"], Value::Null);
    assert_eq!(doc["impact"]["conductance_bound"], Value::Null);
}

#[test]
fn env_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_net(dir.path(), "a.json", &fixtures::net_a());
    let out = Command::new(env!("CARGO_BIN_EXE_wgossip"))
        .args(["simulate", "--network", &a])
        .env("WG_REPLICAS", "7")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("7/7"));
}

#[test]
fn analyze_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_net(dir.path(), "bar.json", &fixtures::barbell(2, 4, Some(0.5)));
    let run = || wgossip(&["analyze", "--network", &net, "--replicas", "100", "--seed", "3"]).stdout;
    assert_eq!(run(), run());
}
