use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nucmeasure"))
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path
}

fn call(args: &[&str], input: Option<&Path>, output: Option<&Path>) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    if let Some(p) = input {
        cmd.arg("--input").arg(p);
    }
    if let Some(p) = output {
        cmd.arg("--output").arg(p);
    }
    cmd.output().unwrap()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn strip_timing(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with("\"timing_seconds\"")).collect::<Vec<_>>().join("\n")
}

fn op(domain: &str, codomain: &str, entries: &[(i64, i64, f64)]) -> Value {
    let e: Vec<Value> = entries.iter().map(|&(r, c, v)| json!([r, c, v, 0.0])).collect();
    json!({ "domain": domain, "codomain": codomain, "entries": e })
}

fn t_family(n: i64) -> Value {
    Value::Array((1..=n).map(|i| op("2", "2", &[(i, i, 1.0)])).collect())
}

#[test]
fn identity_norm_is_exactly_one() {
    let dir = TempDir::new().unwrap();
    let input =
        write(&dir, "p.json", &json!({ "kind": "norm", "payload": { "operator": op("2", "2", &[(1, 1, 1.0), (2, 2, 1.0)]) } }));
    let out = dir.path().join("r.json");
    let o = call(&["norm"], Some(&input), Some(&out));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["result"]["value"], json!({ "lower": 1.0, "upper": 1.0 }));
    assert_eq!(r["result"]["exact"], json!(true));
}

#[test]
fn l1_measure_reports_its_set() {
    let dir = TempDir::new().unwrap();
    let family = json!([{ "entries": [[1, 1.0, 0.0]] }, { "entries": [[2, 1.0, 0.0]] }]);
    let input =
        write(&dir, "p.json", &json!({ "kind": "measure-l1", "payload": { "family": family }, "config": { "budget_c": 1 } }));
    let out = dir.path().join("r.json");
    assert_eq!(call(&["measure-l1"], Some(&input), Some(&out)).status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["value"]["upper"], json!(1.0));
    assert_eq!(r["result"]["chosen"]["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = TempDir::new().unwrap();
    let t = op("3", "1.5", &[(1, 1, 0.7), (1, 2, -0.2), (2, 1, 0.4), (2, 2, 1.1), (3, 1, 0.3)]);
    let input = write(
        &dir,
        "p.json",
        &json!({ "kind": "nuclear", "payload": { "operator": t }, "config": { "seed": 7, "restarts": 4 } }),
    );
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert_eq!(call(&["nuclear"], Some(&input), Some(&a)).status.code(), Some(0));
    assert_eq!(call(&["nuclear"], Some(&input), Some(&b)).status.code(), Some(0));
    let (ta, tb) = (fs::read_to_string(&a).unwrap(), fs::read_to_string(&b).unwrap());
    assert_eq!(strip_timing(&ta), strip_timing(&tb));
    assert!(report(&a)["result"]["upper_certificate"]["representation"]["terms"].is_array());
}

#[test]
fn echoed_config_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let payload = json!({ "family": t_family(6) });
    let input = write(&dir, "p.json", &json!({ "kind": "measure-nuclear", "payload": payload }));
    let first = dir.path().join("first.json");
    let o = call(
        &["measure-nuclear", "--budget-c", "2", "--budget-d", "1", "--solver", "greedy", "--seed", "3"],
        Some(&input),
        Some(&first),
    );
    assert_eq!(o.status.code(), Some(0));
    let r1 = report(&first);
    assert_eq!(r1["config"]["budget_c"], json!(2));
    assert_eq!(r1["config"]["solver"], json!("greedy"));

    let replay = write(&dir, "replay.json", &json!({ "kind": r1["kind"], "payload": payload, "config": r1["config"] }));
    let second = dir.path().join("second.json");
    assert_eq!(call(&["measure-nuclear"], Some(&replay), Some(&second)).status.code(), Some(0));
    let r2 = report(&second);
    assert_eq!(r1["config"], r2["config"]);
    assert_eq!(r1["result"], r2["result"]);
    assert_eq!(r2["result"]["measure"]["solver"], json!("greedy"));
}

#[test]
fn input_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let bad_json = dir.path().join("bad.json");
    fs::write(&bad_json, "{ not json").unwrap();
    let unknown = write(
        &dir,
        "unknown.json",
        &json!({ "kind": "norm", "payload": { "operator": op("2", "2", &[(1, 1, 1.0)]) }, "config": { "tolerance": 1 } }),
    );
    let bad_exp = write(&dir, "exp.json", &json!({ "kind": "norm", "payload": { "operator": op("0.5", "2", &[(1, 1, 1.0)]) } }));
    let float_exp = write(
        &dir,
        "float.json",
        &json!({ "kind": "norm", "payload": { "operator": { "domain": 2.0, "codomain": "2", "entries": [] } } }),
    );
    let mismatch =
        write(&dir, "kind.json", &json!({ "kind": "nuclear", "payload": { "operator": op("2", "2", &[(1, 1, 1.0)]) } }));
    let missing = dir.path().join("missing.json");
    for (args, input) in [
        (vec!["norm"], Some(bad_json.as_path())),
        (vec!["norm"], Some(unknown.as_path())),
        (vec!["norm"], Some(bad_exp.as_path())),
        (vec!["norm"], Some(float_exp.as_path())),
        (vec!["norm"], Some(mismatch.as_path())),
        (vec!["norm"], Some(missing.as_path())),
        (vec!["norm"], None),
        (vec!["norm", "--curve-out", "x.txt"], Some(mismatch.as_path())),
    ] {
        let o = call(&args, input, None);
        assert_eq!(o.status.code(), Some(2), "{args:?} {input:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn enumeration_guard_exits_with_3() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "p.json",
        &json!({ "kind": "measure-nuclear", "payload": { "family": t_family(30) }, "config": { "solver": "exact", "budget_c": 3, "budget_d": 3 } }),
    );
    let o = call(&["measure-nuclear"], Some(&input), None);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    // auto falls back to greedy instead
    assert_eq!(call(&["measure-nuclear", "--solver", "auto"], Some(&input), None).status.code(), Some(0));
}

#[test]
fn non_convergence_is_flagged_not_fatal() {
    let dir = TempDir::new().unwrap();
    let t = op("3", "1.5", &[(1, 1, 0.9), (1, 2, -0.6), (2, 1, 0.5), (2, 2, 0.8), (3, 2, 0.4), (3, 3, -0.7)]);
    let input = write(
        &dir,
        "p.json",
        &json!({ "kind": "nuclear", "payload": { "operator": t }, "config": { "tol": 1e-15, "restarts": 1 } }),
    );
    let out = dir.path().join("r.json");
    assert_eq!(call(&["nuclear"], Some(&input), Some(&out)).status.code(), Some(0));
    assert_eq!(report(&out)["converged"], json!(false));
}

#[test]
fn verify_paper_example_passes() {
    let o = call(&["verify-paper-example"], None, None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["result"]["all_pass"], json!(true));
    assert_eq!(r["result"]["assertions"].as_array().unwrap().len(), 7);
}

#[test]
fn t_family_curve_plot_data() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "p.json",
        &json!({ "kind": "curve", "payload": { "family": { "operators": t_family(50) }, "measure": "nuclear", "k_max": 49 }, "config": { "solver": "greedy" } }),
    );
    let plot = dir.path().join("curve.txt");
    let o = bin().args(["curve", "--curve-out"]).arg(&plot).arg("--input").arg(&input).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&plot).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 50);
    for (k, line) in lines.iter().enumerate().take(49) {
        assert_eq!(*line, format!("{k} 1.0"));
    }
    assert_eq!(lines[49], "49 0.0");
}

#[test]
fn partition_of_a_block_generator() {
    let dir = TempDir::new().unwrap();
    let g = op("2", "2", &[(1, 1, 1.0), (1, 2, 2.0), (2, 1, 3.0), (2, 2, 4.0), (3, 3, 5.0)]);
    let input = write(
        &dir,
        "p.json",
        &json!({ "kind": "partition", "payload": { "generators": [g], "atoms": { "standard": [1, 2, 3] } } }),
    );
    let out = dir.path().join("r.json");
    assert_eq!(call(&["partition"], Some(&input), Some(&out)).status.code(), Some(0));
    assert_eq!(report(&out)["result"]["classes"], json!([[1, 2], [3]]));
}

#[test]
fn bundled_examples_run_as_problem_files() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let o = call(&["nuclear"], Some(&fixtures.join("example_u.json")), None);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let upper = r["result"]["value"]["upper"].as_f64().unwrap();
    assert!((upper - 5f64.sqrt()).abs() <= 1e-9);
}
