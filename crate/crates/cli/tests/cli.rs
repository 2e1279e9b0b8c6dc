//! End-to-end checks of the command surface: exit codes, JSON schemas,
//! error names on stderr, and the reflect round trip.

use std::io::Write;
use std::process::{Command, Output};

use poset_gram::Poset;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poset-gram"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_input(contents: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(contents.as_bytes()).expect("write input");
    file
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn keys(v: &Value) -> Vec<&str> {
    let mut ks: Vec<&str> = v.as_object().expect("object").keys().map(|k| k.as_str()).collect();
    ks.sort_unstable();
    ks
}

/// One-sink square: positive of type D4.
const DIAMOND: &str = "4\n2 1\n2 4\n1 3\n4 3\n";
/// Square with both orientations alternating: corank 1, type A3.
const TWO_SINK_SQUARE: &str = "4\n1 2\n3 2\n3 4\n1 4\n";
/// Underlying path 1-3-5-2-4 with mixed arc directions.
const ZIGZAG: &str = "5\n1 3\n4 2\n5 2\n5 3\n";
/// One-sink square with an outward tail hanging at the sink.
const TAILED: &str = "5\n1 2\n1 3\n2 4\n3 4\n4 5\n";

#[test]
fn classify_reports_the_diamond_exactly() {
    let input = write_input(DIAMOND);
    let out = run(&["classify", "--input", input.path().to_str().unwrap(), "--format", "json"]);
    let v = stdout_json(&out);
    assert_eq!(
        keys(&v),
        vec![
            "corank",
            "definiteness",
            "dynkin",
            "kernel_basis",
            "method",
            "special_deleted",
            "witness"
        ]
    );
    assert_eq!(v["definiteness"], "NonNegative");
    assert_eq!(v["corank"], 0);
    assert_eq!(v["dynkin"], "D4");
    assert_eq!(v["kernel_basis"], Value::Array(vec![]));
    assert_eq!(v["witness"], Value::Null);
}

#[test]
fn classify_text_mentions_the_type() {
    let input = write_input(DIAMOND);
    let out = run(&["classify", "--input", input.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("definiteness: non-negative"));
    assert!(text.contains("corank: 0"));
    assert!(text.contains("dynkin: D4"));
}

#[test]
fn classify_indefinite_carries_a_witness() {
    // Two 4-point forks sharing their prongs plus a tail: indefinite.
    let input = write_input("5\n2 1\n2 3\n4 1\n4 3\n4 5\n");
    let out = run(&["classify", "--input", input.path().to_str().unwrap(), "--format", "json"]);
    let v = stdout_json(&out);
    assert_eq!(v["definiteness"], "Indefinite");
    assert_eq!(v["corank"], Value::Null);
    assert_eq!(v["dynkin"], Value::Null);
    assert!(v["witness"].as_array().map_or(0, |a| a.len()) == 5);
}

#[test]
fn gram_emits_exact_rationals() {
    let input = write_input(DIAMOND);
    let out = run(&["gram", "--input", input.path().to_str().unwrap(), "--format", "json"]);
    let v = stdout_json(&out);
    assert_eq!(keys(&v), vec!["doubled_gram", "gram", "n"]);
    assert_eq!(v["n"], 4);
    assert_eq!(v["doubled_gram"][0][0], 2);
    assert_eq!(v["doubled_gram"][1][0], 1); // 2 <= 1 or 1 <= 2 holds
    assert_eq!(v["gram"][0][0], "1");
    assert_eq!(v["gram"][1][0], "1/2");
    assert_eq!(v["gram"][0][1], "1/2");
}

#[test]
fn kernel_of_a_principal_poset_has_one_vector() {
    let input = write_input(TWO_SINK_SQUARE);
    let out = run(&["kernel", "--input", input.path().to_str().unwrap(), "--format", "json"]);
    let v = stdout_json(&out);
    assert_eq!(keys(&v), vec!["corank", "special_indices", "vectors"]);
    assert_eq!(v["corank"], 1);
    assert_eq!(v["vectors"].as_array().unwrap().len(), 1);
    let entries: Vec<&str> =
        v["vectors"][0].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(entries.len(), 4);
}

#[test]
fn witness_says_none_for_non_negative_input() {
    let input = write_input(DIAMOND);
    let out = run(&["witness", "--input", input.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "none (non-negative)");
}

#[test]
fn witness_value_is_negative_for_indefinite_input() {
    let input = write_input("5\n2 1\n2 3\n4 1\n4 3\n4 5\n");
    let out = run(&["witness", "--input", input.path().to_str().unwrap(), "--format", "json"]);
    let v = stdout_json(&out);
    let q: i64 = v["q"].as_str().unwrap().parse().unwrap();
    assert!(q < 0);
}

#[test]
fn reflect_round_trips_through_the_text_format() {
    let input = write_input(TAILED);
    let once = run(&["reflect", "--input", input.path().to_str().unwrap(), "--anchor", "4"]);
    assert!(once.status.success());
    let reflected = String::from_utf8(once.stdout).unwrap();
    assert_ne!(
        Poset::parse_text(&reflected).unwrap().incidence(),
        Poset::parse_text(TAILED).unwrap().incidence()
    );
    let second_input = write_input(&reflected);
    let twice =
        run(&["reflect", "--input", second_input.path().to_str().unwrap(), "--anchor", "4"]);
    assert!(twice.status.success());
    let back = String::from_utf8(twice.stdout).unwrap();
    assert_eq!(
        Poset::parse_text(&back).unwrap().incidence(),
        Poset::parse_text(TAILED).unwrap().incidence()
    );
}

#[test]
fn reflect_without_anchor_normalizes_every_path() {
    let input = write_input(ZIGZAG);
    let out = run(&["reflect", "--input", input.path().to_str().unwrap()]);
    assert!(out.status.success());
    let normalized = Poset::parse_text(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let expected = Poset::from_covers(5, &[(2, 5), (3, 1), (4, 2), (5, 3)]).unwrap();
    assert_eq!(normalized.incidence(), expected.incidence());
}

#[test]
fn reflect_errors_carry_module_error_names() {
    let input = write_input(ZIGZAG);
    let mixed = run(&["reflect", "--input", input.path().to_str().unwrap(), "--anchor", "4"]);
    assert_eq!(mixed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&mixed.stderr).starts_with("MixedOrientation"));

    let square = write_input(TWO_SINK_SQUARE);
    let missing = run(&["reflect", "--input", square.path().to_str().unwrap(), "--anchor", "2"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("NoSuchAnchoredPath"));
}

#[test]
fn census_json_matches_the_reference_row() {
    let out = run(&["census", "--size", "4", "--format", "json"]);
    let v = stdout_json(&out);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(
        keys(row),
        vec![
            "indefinite",
            "n",
            "positive_a",
            "positive_d1",
            "positive_d2",
            "positive_d3",
            "positive_e",
            "principal_a",
            "principal_e",
            "total_qualifying"
        ]
    );
    assert_eq!(row["total_qualifying"], 10);
    assert_eq!(row["positive_a"], 4);
    assert_eq!(row["positive_d1"], 4);
    assert_eq!(row["positive_d2"], 1);
    assert_eq!(row["principal_a"], 1);
}

#[test]
fn census_output_is_byte_identical_across_jobs() {
    let one = run(&["census", "--size", "5", "--jobs", "1", "--format", "json"]);
    let four = run(&["census", "--size", "5", "--jobs", "4", "--format", "json"]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let text_one = run(&["census", "--size", "5", "--jobs", "1"]);
    let text_two = run(&["census", "--size", "5", "--jobs", "3"]);
    assert_eq!(text_one.stdout, text_two.stdout);
}

#[test]
fn census_rejects_out_of_range_sizes() {
    let out = run(&["census", "--size", "12"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("ResourceLimit"));
}

#[test]
fn orient_reports_paths_and_cycles() {
    let out = run(&["orient", "--size", "6", "--format", "json"]);
    let v = stdout_json(&out);
    assert_eq!(keys(&v), vec!["acyclic_cycle_classes", "cycle", "n", "path"]);
    assert_eq!(v["path"]["labeled"], "32");
    assert_eq!(v["path"]["up_to_iso"], 16);
    assert_eq!(v["cycle"]["labeled"], "64");
    assert_eq!(v["cycle"]["up_to_iso"], 9);
    assert_eq!(v["acyclic_cycle_classes"], 8);

    let tiny = run(&["orient", "--size", "2", "--format", "json"]);
    let v = stdout_json(&tiny);
    assert_eq!(v["cycle"], Value::Null);
    assert_eq!(v["acyclic_cycle_classes"], Value::Null);
}

#[test]
fn count_table_reaches_the_reference_tail() {
    let out = run(&["count", "--n", "21", "--format", "json"]);
    let v = stdout_json(&out);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 21);
    assert_eq!(keys(&rows[0]), vec!["N_C", "N_P", "N_tildeA", "Nneg_A", "n"]);
    assert_eq!(rows[1]["N_C"], Value::Null);
    assert_eq!(rows[20]["n"], 21);
    assert_eq!(rows[20]["Nneg_A"], "574729");
    assert_eq!(rows[9]["N_P"], "256");
    assert_eq!(rows[9]["N_tildeA"], "56");
    let text = run(&["count", "--n", "5"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("Nneg_A"));
}

#[test]
fn usage_errors_exit_with_two() {
    let missing_input = run(&["classify"]);
    assert_eq!(missing_input.status.code(), Some(2));
    let unknown = run(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));
    let bad_size = run(&["count", "--n", "0"]);
    assert_eq!(bad_size.status.code(), Some(2));
}

#[test]
fn unreadable_input_is_a_domain_error() {
    let out = run(&["classify", "--input", "/nonexistent/poset.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("Io:"));
}

#[test]
fn malformed_input_reports_a_parse_error() {
    let input = write_input("4\n2 1\n1 2\n");
    let out = run(&["classify", "--input", input.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.starts_with("DirectedCycle") || err.starts_with("Parse"),
        "stderr: {err}"
    );
}

#[test]
fn json_input_round_trips_through_reflect() {
    let input = write_input(r#"{"n": 5, "covers": [[1,2],[1,3],[2,4],[3,4],[4,5]]}"#);
    let out = run(&["reflect", "--input", input.path().to_str().unwrap(), "--anchor", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // Output format follows the input format.
    let parsed = Poset::parse_json(&text).expect("JSON in, JSON out");
    assert_eq!(parsed.n(), 5);
}
