use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conley_transit::cli::{run_path, Command, RunOptions};
use conley_transit::field::FieldSpec;

#[derive(Parser)]
#[command(name = "conley-transit", version, about = "Exact connection and transition matrix checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    file: PathBuf,
    /// Coefficient field: q, f2 or f<p>; overrides the file.
    #[arg(long)]
    field: Option<FieldSpec>,
    #[arg(long, env = "CONLEY_TRANSIT_BUDGET", default_value_t = conley_transit::connection::DEFAULT_BUDGET)]
    budget: u64,
    /// Also write the certificate here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    verbose: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Trivial,
    Stackable,
    DegreeK,
}

#[derive(Clone, Copy, ValueEnum)]
enum Action {
    Assemble,
    Extract,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that a boundary matrix is strictly triangular and squares to zero.
    Validate(Common),
    /// Homology dimensions on every interval.
    Homology(Common),
    /// Verify the braid axioms, and optionally a braid morphism.
    BraidCheck(Common),
    /// List every connection matrix for a target braid.
    CmEnumerate(Common),
    /// Check that a matrix covers a braid isomorphism.
    TmVerify(Common),
    /// Construct a covering transition matrix.
    TmConstruct {
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[command(flatten)]
        common: Common,
    },
    /// Assemble or split a doubled-order connection matrix.
    Fastslow {
        #[arg(value_enum)]
        action: Action,
        #[command(flatten)]
        common: Common,
    },
    /// Directional matrix for a sign per element.
    Directional {
        /// Signs such as `+,-,+`.
        #[arg(long, allow_hyphen_values = true)]
        signs: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Summary of everything the file defines.
    Report(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut opts = RunOptions::default();
    let (command, common) = match cli.command {
        Cmd::Validate(c) => (Command::Validate, c),
        Cmd::Homology(c) => (Command::Homology, c),
        Cmd::BraidCheck(c) => (Command::BraidCheck, c),
        Cmd::CmEnumerate(c) => (Command::CmEnumerate, c),
        Cmd::TmVerify(c) => (Command::TmVerify, c),
        Cmd::TmConstruct { mode, common } => {
            opts.mode = mode.map(|m| {
                match m {
                    Mode::Trivial => "trivial",
                    Mode::Stackable => "stackable",
                    Mode::DegreeK => "degree-k",
                }
                .to_string()
            });
            (Command::TmConstruct, common)
        }
        Cmd::Fastslow { action, common } => {
            opts.action = Some(
                match action {
                    Action::Assemble => "assemble",
                    Action::Extract => "extract",
                }
                .to_string(),
            );
            (Command::Fastslow, common)
        }
        Cmd::Directional { signs, common } => {
            opts.signs = signs;
            (Command::Directional, common)
        }
        Cmd::Report(c) => (Command::Report, c),
    };
    opts.field = common.field;
    opts.budget = common.budget;
    opts.verbose = common.verbose;

    let cert = run_path(command, &common.file, &opts);
    let text = cert.to_json();
    // A closed pipe is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if let Some(out) = &common.out {
        if let Err(e) = std::fs::write(out, format!("{text}\n")) {
            eprintln!("cannot write {}: {e}", out.display());
            return ExitCode::from(2);
        }
    }
    if common.verbose {
        if let Some(t) = &cert.timings {
            eprintln!("{command}: {} us", t.elapsed_micros);
        }
    }
    ExitCode::from(cert.exit_code() as u8)
}
