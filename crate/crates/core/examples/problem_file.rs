//! Driving the command runner from an in-memory problem file and replaying
//! the resulting certificate.

use conley_transit::cli::{replay, run, Command, RunOptions};
use conley_transit::io::parse_str;

const PROBLEM: &str = r#"{
  "version": 1,
  "field": "f2",
  "poset": {"n": 2, "labels": ["attractor", "repeller"], "covers": [[0, 1]]},
  "spaces": {"C": [{"0": 1}, {"1": 1}]},
  "matrices": {
    "delta": {"kind": "block", "degree": 1, "source": "C", "target": "C",
              "blocks": [{"row": 0, "col": 1, "source_degree": 1, "data": [[1]]}]},
    "delta_prime": {"kind": "block", "degree": 1, "source": "C", "target": "C",
              "blocks": [{"row": 0, "col": 1, "source_degree": 1, "data": [[1]]}]},
    "t": {"kind": "block", "degree": 0, "source": "C", "target": "C",
          "blocks": [{"row": 0, "col": 0, "source_degree": 0, "data": [[1]]},
                     {"row": 1, "col": 1, "source_degree": 1, "data": [[1]]}]},
    "theta": {"kind": "morphism", "degree": 0, "source": "delta", "target": "delta_prime",
              "form": "identity"}
  },
  "task": {"command": "tm-verify", "params": {}}
}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let file = parse_str(PROBLEM)?;
    let opts = RunOptions::default();
    for command in [Command::Validate, Command::Homology, Command::TmVerify, Command::Report] {
        let cert = run(command, &file, &opts);
        println!("{command}: {:?} (exit {})", cert.status, cert.exit_code());
    }
    let cert = run(Command::TmVerify, &file, &opts);
    println!("replay reproduces the certificate: {}", replay(&cert, &file, &opts)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("problem file example");
}
