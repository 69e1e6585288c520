//! The binary's exit codes, certificates and replay.

use std::path::PathBuf;
use std::process::{Command, Output};

use conley_transit::cli::{replay, Certificate, RunOptions, Status};
use conley_transit::io::parse_path;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conley-transit"))
        .args(args)
        .env_remove("CONLEY_TRANSIT_BUDGET")
        .output()
        .unwrap()
}

fn certificate(out: &Output) -> Certificate {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verified_transition_matrix_exits_zero() {
    let path = fixture("attractor_repeller_f2.json");
    let out = run(&["tm-verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let cert = certificate(&out);
    assert_eq!(cert.status, Status::Verified);
    assert_eq!(cert.input_digest.len(), 64);
    assert!(cert.timings.is_none());
}

#[test]
fn uncovered_isomorphism_exits_one() {
    let path = fixture("tm_verify_negative.json");
    let out = run(&["tm-verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(certificate(&out).status, Status::False);
}

#[test]
fn budget_overflow_exits_two() {
    let path = fixture("cm_enumerate_budget.json");
    let out = run(&["cm-enumerate", path.to_str().unwrap(), "--budget", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("SearchBudgetExceeded"));
}

#[test]
fn budget_from_environment() {
    let path = fixture("cm_enumerate_budget.json");
    let out = Command::new(env!("CARGO_BIN_EXE_conley-transit"))
        .args(["cm-enumerate", path.to_str().unwrap()])
        .env("CONLEY_TRANSIT_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn schema_error_names_the_field() {
    let path = fixture("bad_cover.json");
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("SchemaError"));
    assert!(text.contains("/poset/covers/0/1"));
}

#[test]
fn verbose_adds_timings_without_changing_digest() {
    let path = fixture("directional_q.json");
    let plain = certificate(&run(&["directional", path.to_str().unwrap()]));
    let verbose = certificate(&run(&["directional", path.to_str().unwrap(), "--verbose"]));
    assert!(verbose.timings.is_some());
    assert_eq!(plain.input_digest, verbose.input_digest);
    assert_eq!(plain.verdict, verbose.verdict);
}

#[test]
fn signs_flag_changes_the_digest() {
    let path = fixture("directional_q.json");
    let a = certificate(&run(&["directional", path.to_str().unwrap()]));
    let b = certificate(&run(&["directional", path.to_str().unwrap(), "--signs", "-,-,-"]));
    assert_eq!(b.status, Status::Verified);
    assert_ne!(a.input_digest, b.input_digest);
}

#[test]
fn written_certificate_replays() {
    let path = fixture("fastslow_extract.json");
    let dir = std::env::temp_dir().join(format!("conley-transit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("cert.json");
    let out = run(&["fastslow", "extract", path.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stored: Certificate = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(stored, certificate(&out));
    let opts = RunOptions {
        action: Some("extract".into()),
        ..RunOptions::default()
    };
    assert!(replay(&stored, &parse_path(&path).unwrap(), &opts).unwrap());
    let wrong = RunOptions {
        action: Some("assemble".into()),
        ..RunOptions::default()
    };
    assert!(!replay(&stored, &parse_path(&path).unwrap(), &wrong).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn construction_modes() {
    let path = fixture("stackable_trivial_f2.json");
    for mode in ["trivial", "stackable"] {
        let out = run(&["tm-construct", path.to_str().unwrap(), "--mode", mode]);
        assert_eq!(out.status.code(), Some(0), "mode {mode}");
    }
}

#[test]
fn fastslow_assemble_fixture() {
    let path = fixture("fastslow_assemble.json");
    let out = run(&["fastslow", "assemble", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}
