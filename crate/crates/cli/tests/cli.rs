use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pseudofinite")).args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn count_prints_the_number() {
    let o = run(&["count", "--model", "pair:4,2", "--formula", "(and (not (Cinit 0 x)) (not (Cinit 1 x)))"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "6");
}

#[test]
fn count_with_parameters() {
    // strings of length 3 starting with 0, other than y = 000
    let o = run(&["count", "--model", "string:3", "--formula", r#"(and (U "0" x) (not (= x y)))"#, "--params", "y=0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "8");
}

#[test]
fn chain_passes_and_writes_csv() {
    let dir = std::env::temp_dir().join(format!("pf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("chain.csv");
    let o = run(&["chain", "--kind", "a_eqclass", "--depth", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).trim_end().ends_with("PASS"));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("kind,level,param_tuple,count,ratio_to_previous,symbolic_verdict,empirical_verdict"));
    assert_eq!(csv.lines().count(), 1 + 3 * 3);
}

#[test]
fn chain_rejects_overdeep_request() {
    let o = run(&["chain", "--kind", "a_pair", "--depth", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn qe_tree_example() {
    let o = run(&["qe", "--theory", "tree", "--formula", r#"(exists x (and (U "0" x) (B "0" "1" x y)))"#]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().next(), Some(r#"(U "1" y)"#));
    assert!(s.trim_end().ends_with("PASS"));
}

#[test]
fn qe_json_has_schema() {
    let o = run(&["--json", "qe", "--theory", "star", "--formula", "(exists x (= (S 1 x) y))"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"], "PASS");
}

#[test]
fn polycard_json() {
    let o = run(&["--json", "polycard", "--formula", r#"(exists x (and (= (app "f" x) y) (not (Cfin 0 x))))"#]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"], "PASS");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--model", "pair:4,2"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--model", "nope:1", "--formula", "(Cfin 0 x)"]).status.code(), Some(2));
}

#[test]
fn config_file() {
    let dir = std::env::temp_dir().join(format!("pf-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    std::fs::write(&good, r#"{"model": "pair:4,2", "formula": "(Cfin 0 x)"}"#).unwrap();
    let o = run(&["--config", good.to_str().unwrap(), "count"]);
    assert_eq!(stdout(&o).trim(), "2");
    // flags override the file
    let o = run(&["--config", good.to_str().unwrap(), "count", "--model", "pair:4,3"]);
    assert_eq!(stdout(&o).trim(), "3");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"modle": "pair:4,2"}"#).unwrap();
    let o = run(&["--config", bad.to_str().unwrap(), "build"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("modle"));
}

#[test]
fn corpus_writes_rows() {
    let dir = std::env::temp_dir().join(format!("pf-corpus-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("c.csv");
    let o = run(&["corpus", "--kind", "equiv", "--size", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 6);
}
