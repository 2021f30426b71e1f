use std::path::PathBuf;
use std::process::Command;

use wstar::cli::{run_command, EXIT_INPUT, EXIT_OK, EXIT_PRECONDITION, EXIT_PROPERTY, EXIT_UNRESOLVED, EXIT_USAGE};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> wstar::cli::Outcome {
    run_command(args)
}

#[test]
fn lefschetz_of_reflection() {
    let path = fixture("reflection.toml");
    let out = run(&["lefschetz", "--instance", &path, "--no-timestamp"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(out.stdout.contains("L0: (2.000000000)"), "{}", out.stdout);
    assert!(out.stdout.contains("Chern check (weighted): (2.000000000) vs (2.000000000): PASS"));
    assert!(out.stdout.contains("φ = 3.141592654  class (-1)"));
}

#[test]
fn unweighted_reading_fails_on_reflection() {
    let path = fixture("reflection.toml");
    let out = run(&["lefschetz", "--instance", &path, "--no-timestamp", "--unweighted"]);
    assert_eq!(out.code, EXIT_PROPERTY);
    assert!(out.stdout.contains("Chern check (unweighted): (2.000000000) vs (0.000000000): FAIL"));
}

#[test]
fn lefschetz_json_keys() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("l.json");
    let path = fixture("reflection.toml");
    let out = run(&["lefschetz", "--instance", &path, "--json-out", json.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(out.code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["verb"], "lefschetz");
    assert!(v["timestamp"].is_null());
    assert_eq!(v["l0"], serde_json::json!([[2.0, 0.0]]));
    assert_eq!(v["l1"][1]["class"], serde_json::json!([-1]));
    assert_eq!(v["chern"]["equal"], true);
    assert_eq!(v["oracle_bridge"]["pass"], true);
}

#[test]
fn index_of_exact_complex_is_zero() {
    let path = fixture("exact.toml");
    let out = run(&["index", "--instance", &path, "--no-timestamp"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("index of d + d*: (0)"));
    let out = run(&["hodge", "--instance", &path, "--no-timestamp"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("oracle agreement: PASS"));
}

#[test]
fn check_seed_zero_passes() {
    let out = run(&["check", "--seed", "0", "--no-timestamp"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    assert!(!out.stdout.contains("FAIL"));
    assert!(out.stdout.contains("complex.chern[c/U]"));
}

#[test]
fn check_reports_chain_violation() {
    let out = run(&["check", "--instance", &fixture("chain_violation.toml"), "--no-timestamp"]);
    assert_eq!(out.code, EXIT_PROPERTY);
    assert!(out.stdout.contains("FAIL  complex.chain_map[c/U]"));
}

#[test]
fn timestamp_header_is_optional() {
    let with = run(&["index", "--instance", &fixture("exact.toml")]);
    let without = run(&["index", "--instance", &fixture("exact.toml"), "--no-timestamp"]);
    assert!(with.stdout.starts_with("# wstar index at unix time "));
    assert_eq!(with.stdout.lines().skip(1).collect::<Vec<_>>(), without.stdout.lines().collect::<Vec<_>>());
}

#[test]
fn spectrum_picks_the_unitary() {
    let out = run(&["spectrum", "--seed", "4", "--no-timestamp"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("map: u "));
    let out = run(&["spectrum", "--instance", &fixture("reflection.toml"), "--map", "U1", "--no-timestamp"]);
    assert!(out.stdout.contains("cyclic trace: (-1.000000000)"));
}

#[test]
fn demo_example1() {
    let out = run(&["demo", "example1", "--no-timestamp"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("kernel rank: 5 (oracle kernel dimension 5)"));
    for ex in ["example2", "example3"] {
        assert_eq!(run(&["demo", ex, "--no-timestamp"]).code, EXIT_OK, "{ex}");
    }
}

#[test]
fn gen_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("i.toml");
    let out = run(&["gen", "--seed", "11", "--profile", "medium", "--out", file.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK);
    let from_file = run(&["check", "--instance", file.to_str().unwrap(), "--seed", "11", "--no-timestamp"]);
    assert_eq!(from_file.code, EXIT_OK, "{}", from_file.stdout);
    let printed = run(&["gen", "--seed", "11", "--profile", "medium"]);
    assert_eq!(printed.stdout, std::fs::read_to_string(&file).unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(run(&["check", "--profile", "huge"]).code, EXIT_USAGE);
    assert_eq!(run(&["index", "--instance", "/does/not/exist.toml"]).code, EXIT_INPUT);
    assert_eq!(run(&["index", "--instance", &fixture("not_a_projection.toml")]).code, EXIT_INPUT);
    assert_eq!(run(&["spectrum", "--instance", &fixture("reflection.toml"), "--map", "nope"]).code, EXIT_UNRESOLVED);
    assert_eq!(run(&["lefschetz", "--instance", &fixture("reflection.toml"), "--endo", "V"]).code, EXIT_UNRESOLVED);
    assert_eq!(run(&["spectrum", "--instance", &fixture("reflection.toml"), "--map", "d0"]).code, EXIT_PRECONDITION);
    assert_eq!(run(&["lefschetz", "--instance", &fixture("chain_violation.toml")]).code, EXIT_PRECONDITION);
    assert_eq!(run(&["--help"]).code, EXIT_OK);
}

#[test]
fn convergence_maps_to_its_own_code() {
    let e = wstar::Error::Convergence { limit: 10_000, last_term: 1e-7 };
    assert_eq!(wstar::cli::exit_code(&e), wstar::cli::EXIT_CONVERGENCE);
    assert_eq!(wstar::cli::exit_code(&wstar::Error::Consistency("x".into())), EXIT_PROPERTY);
}

#[test]
fn binary_exit_status_and_streams() {
    let bin = env!("CARGO_BIN_EXE_wstar");
    let ok = Command::new(bin).args(["lefschetz", "--instance", &fixture("reflection.toml"), "--no-timestamp"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("L0: (2.000000000)"));
    let bad = Command::new(bin).args(["index", "--instance", &fixture("not_a_projection.toml")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_INPUT));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("module P"));
}
