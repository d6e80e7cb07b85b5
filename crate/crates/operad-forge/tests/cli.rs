//! End-to-end checks of the command-line front end.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_operad-forge")).args(args).output().expect("binary runs")
}

fn data(f: &str) -> String {
    format!("{}/data/{f}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

#[test]
fn valid_terminal_category_exits_zero() {
    let o = run(&["validate", &data("terminal.json")]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn broken_composition_table_is_located() {
    let o = run(&["validate", &data("broken_category.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("total: e ∘ e missing"));
}

#[test]
fn malformed_json_is_an_input_error() {
    let path = std::env::temp_dir().join("operad-forge-malformed.json");
    std::fs::write(&path, "{\"kind\": ").unwrap();
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["validate", &data("does-not-exist.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn free_binary_generator_gives_catalan_rows() {
    let o = run(&["free", &data("binary.json"), "--arity", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let by_arity: Vec<&str> = text.lines().skip_while(|l| *l != "# dims by arity").skip(1).take(3).collect();
    assert_eq!(by_arity, ["2: 1", "3: 2", "4: 5"]);
}

#[test]
fn hyperoperad_generator_row() {
    let o = run(&["hyperoperad", "--arity", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let generators: Vec<&str> = text.lines().skip_while(|l| *l != "# generators").skip(1).take_while(|l| !l.starts_with('#')).collect();
    assert!(generators.contains(&"(2,2;3): 12"), "{generators:?}");
}

#[test]
fn empty_collection_gives_empty_table() {
    let o = run(&["dims", &data("empty.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "# dims\n");
}

#[test]
fn json_output_is_versioned_with_fraction_scalars() {
    let o = run(&["--json", "dga-example"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["format"], "operad-forge/1");
    let actions = v["sections"].as_array().unwrap().iter().find(|s| s["name"] == "actions").unwrap();
    let first = actions["rows"][0]["value"].as_str().unwrap();
    assert!(first.starts_with("1/1 "), "{first}");
}

#[test]
fn non_equivariant_operad_fails_round_trip_checks() {
    let good = run(&["verify-markl", &data("commutative.json"), "--arity", "3"]);
    assert_eq!(good.status.code(), Some(0));
    let bad = run(&["verify-markl", &data("commutative_broken.json"), "--arity", "3"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("equivariance"));
}

#[test]
fn algebra_documents_are_checked() {
    assert_eq!(run(&["check-algebra", &data("two_term_dga.json")]).status.code(), Some(0));
    assert_eq!(run(&["check-algebra", &data("dual_numbers.json")]).status.code(), Some(0));
    let o = run(&["quotient", &data("associative.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(*,*,*;*): 1"));
}

#[test]
fn wrong_document_kind_is_an_input_error() {
    let o = run(&["check-algebra", &data("terminal.json")]);
    assert_eq!(o.status.code(), Some(2));
}
