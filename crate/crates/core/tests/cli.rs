use std::path::Path;

use pseudosphere::classify::{catalog_entry, extract_thm34};
use pseudosphere::cli::{run, Outcome};
use pseudosphere::kernel::parse;
use serde_json::{json, Value};

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("pseudosphere").chain(args.iter().copied()))
}

fn write_config(dir: &Path, name: &str, v: Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

fn json_of(o: &Outcome) -> Value {
    serde_json::from_str(&o.stdout).unwrap()
}

#[test]
fn verify_example_exit_codes() {
    assert_eq!(cli(&["verify", "example", "song-qu-qiao"]).code, 0);
    let o = cli(&["verify", "example", "unknown"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("unknown example"));
    // The spherical example under the wrong curvature sign.
    let o = cli(&["verify", "example", "mch-type", "--delta", "1", "--format", "json"]);
    assert_eq!(o.code, 1);
    let v = json_of(&o);
    assert_eq!(v["verdict"], "fail");
    assert_eq!(cli(&["verify", "example", "mch-type", "--delta", "-1"]).code, 0);
}

#[test]
fn json_reports_are_deterministic_and_stamped() {
    let a = cli(&["verify", "example", "two-component-cubic-ch", "--format", "json"]);
    let b = cli(&["verify", "example", "two-component-cubic-ch", "--format", "json"]);
    assert_eq!(a, b);
    let v = json_of(&a);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn build_thm34_reproduces_the_cubic_system() {
    let dir = tempfile::tempdir().unwrap();
    let entry = catalog_entry("two-component-cubic-ch").unwrap();
    let input = extract_thm34(&entry).unwrap();
    let cfg = json!({
        "expressions": {
            "g": input.g.to_string(), "h": input.h.to_string(),
            "L": input.l.to_string(), "M": input.m.to_string(), "eta": input.eta.to_string(),
        },
        "params": { "delta": 1, "m": input.orders.0, "n": input.orders.1 },
    });
    let path = write_config(dir.path(), "c.json", cfg);
    let out = dir.path().join("built.json");
    let o = cli(&["build", "thm34", "--config", &path, "--out", out.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let built: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(parse(built["system"]["F"].as_str().unwrap()).unwrap(), entry.system.f);
    assert_eq!(parse(built["system"]["G"].as_str().unwrap()).unwrap(), entry.system.g);
}

#[test]
fn build_rejects_hypothesis_violations() {
    let dir = tempfile::tempdir().unwrap();
    let degenerate = json!({
        "expressions": { "g": "u - u2", "h": "2*(u - u2)", "L": "v", "M": "u1" },
        "params": { "delta": 1 },
    });
    let o = cli(&["build", "thm34", "--config", &write_config(dir.path(), "w.json", degenerate)]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("W = g_u h_v - g_v h_u"), "{}", o.stderr);
    let mixed = json!({
        "expressions": {
            "g": "u - u2", "h": "v - v2", "A": "0", "L1": "0", "N1": "u1*v1^2", "M": "u",
        },
        "params": { "delta": 1 },
    });
    let o = cli(&["build", "thm36", "--config", &write_config(dir.path(), "m.json", mixed)]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("u2 v1"), "{}", o.stderr);
}

#[test]
fn config_errors_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let o = cli(&["verify", "lemma31", "--config", path.to_str().unwrap()]);
    assert_eq!(o.code, 2);
    let missing = write_config(dir.path(), "m.json", json!({ "expressions": {}, "params": { "delta": 1 } }));
    assert_eq!(cli(&["verify", "lemma31", "--config", &missing]).code, 2);
    assert_eq!(cli(&["frobnicate"]).code, 2);
}

#[test]
fn lemma31_and_lax_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let entry = catalog_entry("mch-type").unwrap();
    let mut exprs = serde_json::Map::new();
    for i in 0..3 {
        for j in 0..2 {
            exprs.insert(format!("f{}{}", i + 1, j + 1), json!(entry.forms.f[i][j].to_string()));
        }
    }
    exprs.insert("F".into(), json!(entry.system.f.to_string()));
    exprs.insert("G".into(), json!(entry.system.g.to_string()));
    let lax = entry.lax.unwrap();
    for (p, m) in [("X", &lax.x), ("T", &lax.t)] {
        for i in 0..2 {
            for j in 0..2 {
                exprs.insert(format!("{p}{}{}", i + 1, j + 1), json!(m[i][j].to_string()));
            }
        }
    }
    let path = write_config(dir.path(), "c.json", json!({ "expressions": exprs, "params": { "delta": -1 } }));
    assert_eq!(cli(&["verify", "lemma31", "--config", &path]).code, 0);
    assert_eq!(cli(&["lax", "check", "--config", &path]).code, 0);
    assert_eq!(cli(&["verify", "lemma31", "--config", &path, "--delta", "1"]).code, 1);
}

#[test]
fn ch2_symbolic_tasks() {
    let o = cli(&["ch2", "symmetry", "--format", "json"]);
    assert_eq!(o.code, 0);
    let v = json_of(&o);
    let conds = v["reports"][0]["conditions"].as_array().unwrap();
    assert_eq!(conds[0]["residual_text"], "0");
    assert_eq!(conds[1]["residual_text"], "0");
    assert_eq!(cli(&["ch2", "prolong"]).code, 0);
    assert_eq!(cli(&["ch2", "taylor"]).code, 0);
}

#[test]
fn ch2_solution_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.csv");
    let o = cli(&[
        "ch2", "solution", "--u0", "0.75", "--eta", "1", "--eps", "1", "--grid", "-2:2:0.125,0:1:0.1", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().next().unwrap().contains("k=0.5"));
    let o = cli(&["ch2", "solution", "--u0", "2", "--eta", "1"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("1 - eta^2 u0 > 0"));
    assert_eq!(cli(&["ch2", "solution", "--grid", "1:2"]).code, 2);
}

#[test]
fn ch2_residual_ladder() {
    let o = cli(&["ch2", "residual", "--grid", "-4:4:0.0625,-0.5:0.5:0.0625", "--format", "json"]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    let v = json_of(&o);
    let order = v["data"]["transformed"]["order"].as_f64().unwrap();
    assert!((order - 2.0).abs() <= 0.3);
    assert!(v["data"]["printed_chart_diagnostic"]["order"].as_f64().unwrap() < 0.5);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_pseudosphere");
    let code = |args: &[&str]| std::process::Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["verify", "example", "song-qu-qiao"]), Some(0));
    assert_eq!(code(&["verify", "example", "mch-type", "--delta", "1"]), Some(1));
    assert_eq!(code(&["verify", "example", "nope"]), Some(2));
}
