use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_firebreak"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn error_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

fn field<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key}= line in {out}"))
}

#[test]
fn solve_sample_tree() {
    let path = data("sample_tree.json");
    for algo in ["tree", "exhaustive"] {
        let o = run(&["solve", "--algo", algo, path.to_str().unwrap()]);
        assert!(o.status.success(), "{algo}: {o:?}");
        let out = stdout(&o);
        assert_eq!(field(&out, "saved"), "4");
        assert_eq!(field(&out, "risk"), "4");
        assert_eq!(field(&out, "cost"), "3");
        if algo == "tree" {
            assert_eq!(field(&out, "cuts"), "3-0,3-1,7-6");
        }
    }
}

#[test]
fn risk_engines_agree_on_sample_tree() {
    let path = data("sample_tree.json");
    for engine in ["windy", "exact", "naive"] {
        let o = run(&["risk", "--engine", engine, path.to_str().unwrap()]);
        assert!(o.status.success(), "{engine}: {o:?}");
        assert_eq!(field(&stdout(&o), "risk"), "8");
    }
}

#[test]
fn monte_carlo_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("r.json");
    assert!(run(&["gen", "random", "--n", "7", "--seed", "3", inst.to_str().unwrap()]).status.success());
    let args = ["risk", "--engine", "mc", "--seed", "7", "--samples", "1000", inst.to_str().unwrap()];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{a:?}");
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(field(&stdout(&a), "samples"), "1000");
    let other = run(&["risk", "--engine", "mc", "--seed", "8", "--samples", "1000", inst.to_str().unwrap()]);
    assert!(other.status.success());
}

#[test]
fn gen_is_deterministic_for_every_kind() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["tree", "star", "grid", "random"] {
        let a = dir.path().join(format!("{kind}-a.json"));
        let b = dir.path().join(format!("{kind}-b.json"));
        for p in [&a, &b] {
            let o = run(&["gen", kind, "--n", "6", "--seed", "1", p.to_str().unwrap()]);
            assert!(o.status.success(), "{kind}: {o:?}");
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{kind}");
    }
}

#[test]
fn grid_has_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.json");
    assert!(run(&["gen", "grid", "--n", "4", p.to_str().unwrap()]).status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 16);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 24);
}

#[test]
fn serialized_instances_parse_back_identically() {
    let original = std::fs::read_to_string(data("sample_tree.json")).unwrap();
    let inst = firebreak::instance::parse_instance_str(&original).unwrap();
    let text = inst.to_json_string();
    assert_eq!(firebreak::instance::parse_instance_str(&text).unwrap(), inst);
    assert_eq!(firebreak::instance::parse_instance_str(&text).unwrap().to_json_string(), text);

    // Files written by the CLI are already in serialized form.
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.json");
    assert!(run(&["gen", "tree", "--n", "12", "--seed", "5", p.to_str().unwrap()]).status.success());
    let written = std::fs::read_to_string(&p).unwrap();
    assert_eq!(firebreak::instance::parse_instance_str(&written).unwrap().to_json_string(), written);
}

#[test]
fn errors_are_json_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"mode": "rational", "vertices": [{"id": 0, "value": 1, "ignition": 1.5}], "edges": [], "budget": 0}"#,
    )
    .unwrap();
    let o = run(&["solve", "--algo", "tree", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_json(&o)["error"], "format");

    let o = run(&["risk", "--engine", "windy", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_json(&o)["error"], "io");

    let o = run(&["solve", "--algo", "greedy", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "usage");

    let o = run(&["gen", "tree", "--n", "0", dir.path().join("x.json").to_str().unwrap()]);
    assert!(!o.status.success());
    assert_eq!(error_json(&o)["error"], "invalid_input");

    // Not a tree: the tree solver refuses, exhaustive search does not.
    let cyc = dir.path().join("cycle.json");
    std::fs::write(
        &cyc,
        r#"{"mode": "rational", "vertices": [{"id": 0, "value": 1, "ignition": 1}, {"id": 1, "value": 1, "ignition": 0}, {"id": 2, "value": 1, "ignition": 0}],
            "edges": [{"tail": 0, "head": 1, "directed": false, "spread": 1, "cost": 1}, {"tail": 1, "head": 2, "directed": false, "spread": 1, "cost": 1}, {"tail": 2, "head": 0, "directed": false, "spread": 1, "cost": 1}],
            "budget": 2, "risk_threshold": 0}"#,
    )
    .unwrap();
    let o = run(&["solve", "--algo", "tree", cyc.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_json(&o)["error"], "invalid_input");

    // Optimum risk 1 exceeds the threshold 0.
    let o = run(&["solve", "--algo", "exhaustive", cyc.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(field(&stdout(&o), "saved"), "2");
    assert_eq!(error_json(&o)["error"], "infeasible");
}

#[test]
fn reduce_writes_instance_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    std::fs::write(d.join("w.json"), "[3, 1, 1, 2, 2, 1]").unwrap();
    let out = d.join("star.json");
    assert!(run(&["reduce", "partition", d.join("w.json").to_str().unwrap(), out.to_str().unwrap()]).status.success());
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(d.join("star.json.cert.json")).unwrap()).unwrap();
    assert!(cert["reduction"].is_string());
    let o = run(&["solve", "--algo", "exhaustive", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");

    std::fs::write(d.join("f.cnf"), "p cnf 3 2\n1 2 3 0\n-1 2 0\n").unwrap();
    let g = d.join("g.cnf");
    assert!(run(&["reduce", "3sat-2sat", d.join("f.cnf").to_str().unwrap(), g.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(&g).unwrap();
    // One 3-clause and one 2-clause: K = 7·2 + 4·1.
    assert!(text.starts_with("c threshold 18\n"), "{text}");

    std::fs::write(d.join("m.cnf"), "p cnf 2 2\n1 2 0\n-1 -2 0\n").unwrap();
    let w = d.join("wfl.json");
    let o = run(&["reduce", "2sat-wfl", d.join("m.cnf").to_str().unwrap(), w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "a missing threshold must be reported");
    let o = run(&["reduce", "2sat-wfl", "--k", "2", d.join("m.cnf").to_str().unwrap(), w.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    assert!(d.join("wfl.json.cert.json").exists());

    let fv = d.join("fv.json");
    let sample = data("sample_tree.json");
    assert!(run(&["reduce", "flatten-values", sample.to_str().unwrap(), fv.to_str().unwrap()]).status.success());
    assert_eq!(field(&stdout(&run(&["solve", "--algo", "tree", fv.to_str().unwrap()])), "saved"), "4");

    let o = run(&["reduce", "partition", "--f", "2", d.join("w.json").to_str().unwrap(), out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flatten_costs_scales_risk_by_grid_size() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let inst = d.join("path.json");
    std::fs::write(
        &inst,
        r#"{"mode": "rational", "vertices": [{"id": 0, "value": 1, "ignition": "1/2"}, {"id": 1, "value": 1, "ignition": 0}],
            "edges": [{"tail": 0, "head": 1, "directed": false, "spread": 1, "cost": 2}],
            "budget": 2, "risk_threshold": "1/2"}"#,
    )
    .unwrap();
    let out = d.join("flat.json");
    let o = run(&["reduce", "flatten-costs", inst.to_str().unwrap(), out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(d.join("flat.json.cert.json")).unwrap()).unwrap();
    // Default f = lcm(2)·⌈2/2⌉ = 2.
    assert_eq!(cert["parameters"]["f"], 2);
    let m = cert["parameters"]["M"].as_u64().unwrap() as f64;
    let o = run(&["risk", "--engine", "windy", out.to_str().unwrap()]);
    let rho: f64 = field(&stdout(&o), "risk").parse().unwrap();
    assert!((rho - m * m).abs() <= 1e-9 * m * m, "rho {rho}, M {m}");
}

#[test]
fn export_marks_cut_edges() {
    let o = run(&["export", "--dot", data("sample_tree.json").to_str().unwrap()]);
    assert!(o.status.success());
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("dashed").count(), 3);
}

#[test]
fn verify_gadgets_passes() {
    let o = run(&["verify", "gadgets"]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o).matches("[PASS]").count(), 4);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let sample = data("sample_tree.json");
    let suite = dir.path().join("suite.json");
    std::fs::write(
        &suite,
        format!(
            r#"{{"instances": [{{"id": "s", "algo": "tree", "file": {}}}, {{"id": "g", "algo": "tree", "generate": "tree", "n": 30, "budget": 4}}]}}"#,
            serde_json::to_string(sample.to_str().unwrap()).unwrap()
        ),
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let o = run(&["bench", "--suite", suite.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("id,|V|,|E|,B,algo,ms,value"));
    assert!(lines.next().unwrap().starts_with("s,8,7,3,tree,"));
    assert!(lines.next().unwrap().starts_with("g,30,29,4,tree,"));

    let o = run(&["bench", "--suite", dir.path().join("none.json").to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(!o.status.success());
    error_json(&o);
}
