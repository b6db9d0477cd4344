use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const THETA: &str = r#"{
  "vertices": ["u", "v"],
  "half_edges": [
    {"id": "h0", "at": "u"}, {"id": "h1", "at": "v"},
    {"id": "h2", "at": "u"}, {"id": "h3", "at": "v"},
    {"id": "h4", "at": "u"}, {"id": "h5", "at": "v"}
  ],
  "edges": [["h0", "h1"], ["h2", "h3"], ["h4", "h5"]]
}"#;

const BAR: &str = r#"{
  "vertices": ["u", "v"],
  "half_edges": [{"id": "h0", "at": "u"}, {"id": "h1", "at": "v"}],
  "edges": [["h0", "h1"]],
  "marking": {"x": "u", "y": "v"}
}"#;

const BUNDLE: &str = r#"{
  "attach": ["x", "y"],
  "half_edges": [
    {"id": "k0", "at": "x"}, {"id": "k1", "at": "y"},
    {"id": "k2", "at": "x"}, {"id": "k3", "at": "y"}
  ],
  "edges": [["k0", "k1"], ["k2", "k3"]]
}"#;

const BROKEN: &str = r#"{
  "vertices": ["u"],
  "half_edges": [{"id": "h0", "at": "u"}, {"id": "h1", "at": "w"}, {"id": "h2", "at": "u"}],
  "edges": [["h0", "h1"]],
  "marking": {"b": "nowhere"}
}"#;

struct Files(TempDir);

impl Files {
    fn new() -> Files {
        Files(tempfile::tempdir().unwrap())
    }

    fn put(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

fn grcob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grcob"))
        .args(args)
        .env_remove("GRCOB_SEED")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn chi_of_theta() {
    let f = Files::new();
    let theta = f.put("theta.json", THETA);
    let o = grcob(&["chi", path(&theta)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "-1");
    let o = grcob(&["--json", "chi", path(&theta)]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["chi"], -1);
}

#[test]
fn validate_reports_every_violation() {
    let f = Files::new();
    let bad = f.put("bad.json", BROKEN);
    let o = grcob(&["validate", path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    let o = grcob(&["--json", "validate", path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["valid"], false);
    assert!(v["violations"].as_array().unwrap().len() >= 3);
    let good = f.put("good.json", THETA);
    assert!(grcob(&["validate", path(&good)]).status.success());
}

#[test]
fn invalid_input_to_other_commands_exits_one() {
    let f = Files::new();
    let bad = f.put("bad.json", BROKEN);
    assert_eq!(grcob(&["chi", path(&bad)]).status.code(), Some(1));
}

#[test]
fn malformed_input_exits_two() {
    let f = Files::new();
    let junk = f.put("junk.json", "{ not json");
    assert_eq!(grcob(&["chi", path(&junk)]).status.code(), Some(2));
    assert_eq!(grcob(&["chi", "/definitely/missing.json"]).status.code(), Some(2));
    assert_eq!(grcob(&["check", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn compose_and_sign() {
    let f = Files::new();
    let (g, h) = (f.put("g.json", BAR), f.put("h.json", BUNDLE));
    let out = f.0.path().join("k.json");
    let o = grcob(&["-o", path(&out), "compose", path(&g), path(&h)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = grcob(&["chi", path(&out)]);
    assert_eq!(stdout(&o).trim(), "-1");
    let o = grcob(&["--json", "xi", path(&g), "-d", "1", "--compose", path(&h)]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["compose_sign"] == 1 || v["compose_sign"] == -1);
    assert_eq!(v["degree"], 1);
    assert!(grcob(&["compose", path(&h), path(&g)]).status.success());
    assert_eq!(grcob(&["compose", path(&g), path(&g)]).status.code(), Some(2));
}

#[test]
fn functoriality_check_passes() {
    let o = grcob(&["check", "--suite", "functoriality", "--seed", "7", "--n", "200"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS functoriality"));
}

#[test]
fn seed_comes_from_the_environment() {
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_grcob"));
        c.args(["pool", "--seed", "1", "--size", "5"]);
        match env {
            Some(s) => c.env("GRCOB_SEED", s),
            None => c.env_remove("GRCOB_SEED"),
        };
        c.output().unwrap()
    };
    let plain = run(None);
    let forced = run(Some("99"));
    let direct = grcob(&["pool", "--seed", "99", "--size", "5"]);
    assert_ne!(plain.stdout, forced.stdout);
    assert_eq!(forced.stdout, direct.stdout);
    let v: Value = serde_json::from_slice(&forced.stdout).unwrap();
    assert_eq!(v["seed"], 99);
    assert_eq!(run(Some("x")).status.code(), Some(2));
}

#[test]
fn spine_listing_and_homology() {
    let o = grcob(&["spine", "-n", "2", "--list"]);
    assert!(stdout(&o).starts_with("3 classes"));
    let o = grcob(&["--json", "spine", "-n", "2", "--homology", "-d", "0"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["betti"], serde_json::json!([1, 0]));
    let o = grcob(&["spine", "-n", "3", "--homology", "-d", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().all(|l| l.ends_with("Q^0")));
    assert_eq!(grcob(&["spine", "-n", "4", "--homology"]).status.code(), Some(2));
    assert_eq!(grcob(&["spine", "-n", "9", "--list"]).status.code(), Some(2));
}

#[test]
fn eval_of_a_circle() {
    let f = Files::new();
    let circle = f.put(
        "circle.json",
        r#"{"vertices": ["v"], "half_edges": [{"id": "h0", "at": "v"}, {"id": "h1", "at": "v"}], "edges": [["h0", "h1"]]}"#,
    );
    for (alg, value) in [("s2", "2"), ("t2", "0"), ("cp2", "3")] {
        let o = grcob(&["--json", "eval", path(&circle), "--algebra", alg]);
        assert!(o.status.success());
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        let entries = v["entries"].as_array().unwrap();
        let got = entries.first().map_or("0", |e| e["coeff"].as_str().unwrap());
        assert_eq!(got, value, "{alg}");
        assert_eq!(v["degree"], 0);
    }
    let alg = f.put("ground.json", r#"{"d": 0, "basis": [{"name": "1", "deg": 0}], "unit": "1", "product": {"1,1": [["1", 3]]}, "counit": {"1": "1"}}"#);
    assert_eq!(grcob(&["eval", path(&circle), "--algebra", path(&alg)]).status.code(), Some(2));
}

#[test]
fn reduce_and_minimize() {
    let f = Files::new();
    let tree = f.put(
        "tree.json",
        r#"{"attach": ["a"], "vertices": ["v", "w"], "half_edges": [{"id": "h0", "at": "a"}, {"id": "h1", "at": "v"}, {"id": "h2", "at": "w"}, {"id": "h3", "at": "w"}], "edges": [["h0", "h1"], ["h2", "h3"]], "marking": {"b": "a"}}"#,
    );
    let o = grcob(&["--json", "minimize", path(&tree)]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 1);
    let o = grcob(&["--json", "reduce", path(&tree)]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["half_edges"].as_array().unwrap().len(), 4);
    let loose = f.put("loose.json", &std::fs::read_to_string(&tree).unwrap().replace(r#"{"b": "a"}"#, r#"{"b": "w"}"#));
    let o = grcob(&["--json", "reduce", path(&loose)]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["vertices"], serde_json::json!(["w"]));
    assert_eq!(v["half_edges"].as_array().unwrap().len(), 2);
}

#[test]
fn invariants_compare() {
    let f = Files::new();
    let theta = f.put("theta.json", THETA);
    let o = grcob(&["invariants", path(&theta), "--compare", path(&theta), "--zigzag-depth", "1"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let bar = f.put("bar.json", BAR);
    assert_eq!(grcob(&["invariants", path(&theta), "--compare", path(&bar)]).status.code(), Some(1));
}
