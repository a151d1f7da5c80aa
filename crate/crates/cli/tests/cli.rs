use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compareviz"))
        .args(args)
        .env_remove("COMPAREVIZ_LEXICON")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn classify_explicit_one_to_one() {
    let sales = data("sales.csv");
    let out = run(&["classify", "--data", &sales, "--utterance", "compare the sales for Washington and California"]);
    let v = json(&out);
    assert_eq!(v["cardinality"], "1-1");
    assert_eq!(v["concreteness"]["cell"], "ev-ea");
}

#[test]
fn recommend_one_to_many_in_rank_order() {
    let books = data("books.csv");
    let out = run(&[
        "recommend",
        "--data",
        &books,
        "--utterance",
        "compare the price of The Alchemist to other fiction books",
    ]);
    let v = json(&out);
    let letters: Vec<&str> = v["recommendations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["design"].as_str().unwrap())
        .collect();
    assert_eq!(letters, ["E", "F", "G", "H"]);
}

#[test]
fn non_comparison_exits_2() {
    let out = run(&["classify", "--data", &data("books.csv"), "--utterance", "hello"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a comparison"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unresolvable_term_exits_3() {
    let out = run(&["resolve", "--data", &data("books.csv"), "--utterance", "compare the price of all purple books"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("purple"));
}

#[test]
fn missing_file_exits_2() {
    let out = run(&["classify", "--data", "/nonexistent.csv", "--utterance", "compare a and b"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn choose_overrides_interpretation() {
    let netflix = data("netflix.csv");
    let base = ["resolve", "--data", &netflix, "--utterance", "compare the box office of all high rated movies"];
    let v = json(&run(&base));
    assert_eq!(v["entries"]["value:0"]["chosen"], 0);
    let mut chosen = base.to_vec();
    chosen.extend(["--choose", "value:0=2"]);
    let v = json(&run(&chosen));
    assert_eq!(v["entries"]["value:0"]["chosen"], 2);
    let mut bad = base.to_vec();
    bad.extend(["--choose", "value:0=7"]);
    assert_eq!(run(&bad).status.code(), Some(2));
}

#[test]
fn stdout_is_byte_stable() {
    let netflix = data("netflix.csv");
    let args = [
        "emit",
        "--data",
        &netflix,
        "--utterance",
        "compare crime shows to thriller shows in terms of box office",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let specs: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(specs.as_array().unwrap().len(), 4);
}

#[test]
fn emit_writes_one_file_per_design() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().display().to_string();
    let out = run(&[
        "emit",
        "--data",
        &data("books.csv"),
        "--utterance",
        "compare fiction books to non fiction books in terms of price",
        "--top-k",
        "3",
        "--out-dir",
        &out_dir,
    ]);
    let written = json(&out);
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["1-M.vl.json", "2-N.vl.json", "3-O.vl.json", "4-P.vl.json"]);
    assert_eq!(written.as_array().unwrap().len(), 4);
    let spec: Value = serde_json::from_slice(&std::fs::read(dir.path().join("1-M.vl.json")).unwrap()).unwrap();
    assert!(spec["data"]["values"].as_array().unwrap().len() <= 6);
    assert!(spec["usermeta"]["transforms"]["top_k"].as_array().unwrap().iter().all(|g| g["k"] == 3));
}

#[test]
fn lexicon_env_overrides_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lexicon.json");
    std::fs::write(&path, r#"{"entries": []}"#).unwrap();
    let books = data("books.csv");
    let args = ["resolve", "--data", &books, "--utterance", "compare the price of all bestseller books"];
    assert!(run(&args).status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_compareviz"))
        .args(args)
        .env("COMPAREVIZ_LEXICON", &path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bestseller"));
}

#[test]
fn catalog_lists_sixteen_designs() {
    let v = json(&run(&["catalog"]));
    assert_eq!(v["designs"].as_array().unwrap().len(), 16);
    let table = run(&["catalog", "--format", "table"]);
    assert_eq!(String::from_utf8_lossy(&table.stdout).lines().count(), 17);
}
