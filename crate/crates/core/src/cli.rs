//! Command execution over problem files, producing deterministic JSON
//! certificates that can be replayed.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::block::BlockGradedMap;
use crate::braid::ChainBraid;
use crate::connection::{enumerate_connection_matrices, is_connection_matrix, validate, DEFAULT_BUDGET};
use crate::directional::{directional_matrix, nonzero_entry_report, relabel_in_out};
use crate::error::{Error, Result};
use crate::fastslow::{assemble_fastslow, continuation_cover, extract_singular, FastSlowAssembly};
use crate::field::{Field, FieldSpec, PrimeField, Rationals};
use crate::graded::GradedSpace;
use crate::io::{block_to_json, morphism_to_json, parse_str, spaces_to_json, MatrixJson, Model, ProblemFile};
use crate::poset::{Interval, Poset};
use crate::transition::TransitionSetting;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Validate,
    Homology,
    BraidCheck,
    CmEnumerate,
    TmVerify,
    TmConstruct,
    Fastslow,
    Directional,
    Report,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Validate,
        Command::Homology,
        Command::BraidCheck,
        Command::CmEnumerate,
        Command::TmVerify,
        Command::TmConstruct,
        Command::Fastslow,
        Command::Directional,
        Command::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Homology => "homology",
            Command::BraidCheck => "braid-check",
            Command::CmEnumerate => "cm-enumerate",
            Command::TmVerify => "tm-verify",
            Command::TmConstruct => "tm-construct",
            Command::Fastslow => "fastslow",
            Command::Directional => "directional",
            Command::Report => "report",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown command {s:?}")))
    }
}

/// Settings that override or supplement the task parameters in a file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunOptions {
    pub field: Option<FieldSpec>,
    pub budget: u64,
    /// `trivial`, `stackable` or `degree-k` for `tm-construct`.
    pub mode: Option<String>,
    /// `assemble` or `extract` for `fastslow`.
    pub action: Option<String>,
    /// Comma-separated signs for `directional`.
    pub signs: Option<String>,
    #[serde(skip)]
    pub verbose: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            field: None,
            budget: DEFAULT_BUDGET,
            mode: None,
            action: None,
            signs: None,
            verbose: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    False,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Verified => 0,
            Status::False => 1,
            Status::Error => 2,
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Verified
        } else {
            Status::False
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub elapsed_micros: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub command: String,
    /// SHA-256 of the canonical JSON of the file and the run options.
    pub input_digest: String,
    pub status: Status,
    pub verdict: Value,
    pub witnesses: Value,
    /// Present only in verbose runs; never part of the digest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl Certificate {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }
}

struct Outcome {
    status: Status,
    verdict: Value,
    witnesses: Value,
}

impl Outcome {
    fn new(ok: bool, verdict: Value, witnesses: Value) -> Self {
        Outcome {
            status: Status::from_bool(ok),
            verdict,
            witnesses,
        }
    }

    fn error(e: &Error) -> Self {
        let witnesses = match e {
            Error::IncompatibleBlock { residual } => json!({ "residual": residual }),
            _ => Value::Null,
        };
        let mut verdict = json!({ "error": e.kind(), "message": e.to_string() });
        if let Error::Schema { pointer, .. } = e {
            verdict["pointer"] = json!(pointer);
        }
        Outcome {
            status: Status::Error,
            verdict,
            witnesses,
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn input_digest(command: Command, file: &ProblemFile, opts: &RunOptions) -> String {
    let canonical = json!({ "command": command.name(), "file": file, "options": opts });
    sha256_hex(canonical.to_string().as_bytes())
}

/// Run `command` on a parsed file.
pub fn run(command: Command, file: &ProblemFile, opts: &RunOptions) -> Certificate {
    let start = Instant::now();
    let outcome = execute(command, file, opts).unwrap_or_else(|e| Outcome::error(&e));
    Certificate {
        command: command.name().to_string(),
        input_digest: input_digest(command, file, opts),
        status: outcome.status,
        verdict: outcome.verdict,
        witnesses: outcome.witnesses,
        timings: opts.verbose.then(|| Timings {
            elapsed_micros: start.elapsed().as_micros(),
        }),
    }
}

/// Run `command` on raw JSON text; parse failures become error
/// certificates digested over the raw bytes.
pub fn run_text(command: Command, text: &str, opts: &RunOptions) -> Certificate {
    match parse_str(text) {
        Ok(file) => run(command, &file, opts),
        Err(e) => {
            let outcome = Outcome::error(&e);
            Certificate {
                command: command.name().to_string(),
                input_digest: sha256_hex(text.as_bytes()),
                status: outcome.status,
                verdict: outcome.verdict,
                witnesses: outcome.witnesses,
                timings: None,
            }
        }
    }
}

pub fn run_path(command: Command, path: &Path, opts: &RunOptions) -> Certificate {
    match std::fs::read_to_string(path) {
        Ok(text) => run_text(command, &text, opts),
        Err(e) => {
            let outcome = Outcome::error(&Error::Io(e));
            Certificate {
                command: command.name().to_string(),
                input_digest: String::new(),
                status: outcome.status,
                verdict: outcome.verdict,
                witnesses: outcome.witnesses,
                timings: None,
            }
        }
    }
}

/// Run the command named in the file's task.
pub fn run_task(file: &ProblemFile, opts: &RunOptions) -> Result<Certificate> {
    let name = file
        .task
        .command
        .as_deref()
        .ok_or_else(|| Error::Precondition("task has no command".into()))?;
    Ok(run(name.parse()?, file, opts))
}

/// Re-run a stored certificate against its input and compare everything
/// except timings.
pub fn replay(cert: &Certificate, file: &ProblemFile, opts: &RunOptions) -> Result<bool> {
    let command: Command = cert.command.parse()?;
    let again = run(command, file, opts);
    Ok(again.input_digest == cert.input_digest
        && again.status == cert.status
        && again.verdict == cert.verdict
        && again.witnesses == cert.witnesses)
}

fn execute(command: Command, file: &ProblemFile, opts: &RunOptions) -> Result<Outcome> {
    let spec = match opts.field {
        Some(f) => f,
        None => file.field.parse()?,
    };
    match spec {
        FieldSpec::Rationals => Runner::new(Rationals, file, opts)?.run(command),
        FieldSpec::Prime(p) => Runner::new(PrimeField::new(p)?, file, opts)?.run(command),
    }
}

fn dims_json(s: &GradedSpace) -> BTreeMap<String, usize> {
    s.iter().map(|(k, d)| (k.to_string(), d)).collect()
}

struct Runner<'a, F: Field> {
    model: Model<F>,
    opts: &'a RunOptions,
}

impl<'a, F: Field> Runner<'a, F> {
    fn new(field: F, file: &ProblemFile, opts: &'a RunOptions) -> Result<Self> {
        Ok(Runner {
            model: Model::new(field, file.clone())?,
            opts,
        })
    }

    fn name(&self, key: &'a str) -> &str {
        self.model.param(key).unwrap_or(key)
    }

    fn poset(&self, key: &str) -> Result<Poset> {
        self.model.poset(self.model.param(key))
    }

    fn space_name(&self, matrix: &str, target: bool) -> Result<String> {
        let b = self.model.block_json(matrix)?;
        Ok(if target { b.target.clone() } else { b.source.clone() })
    }

    fn run(&self, command: Command) -> Result<Outcome> {
        match command {
            Command::Validate => self.validate(),
            Command::Homology => self.homology(),
            Command::BraidCheck => self.braid_check(),
            Command::CmEnumerate => self.cm_enumerate(),
            Command::TmVerify => self.tm_verify(),
            Command::TmConstruct => self.tm_construct(),
            Command::Fastslow => self.fastslow(),
            Command::Directional => self.directional(),
            Command::Report => self.report(),
        }
    }

    fn validate(&self) -> Result<Outcome> {
        let poset = self.poset("poset")?;
        let delta = self.model.block(self.name("delta"))?;
        let v = validate(&poset, &delta)?;
        Ok(Outcome::new(
            v.is_valid(),
            json!({ "valid": v.is_valid(), "checks": v }),
            Value::Null,
        ))
    }

    fn homology(&self) -> Result<Outcome> {
        let poset = self.poset("poset")?;
        let cb = self.model.chain_braid(&poset, self.name("delta"))?;
        let braid = cb.braid();
        let per_interval: Vec<Value> = braid
            .intervals()
            .iter()
            .map(|i| json!({ "interval": i, "dims": dims_json(braid.dims(i)) }))
            .collect();
        let total = braid.dims(&Interval::full(poset.len()));
        Ok(Outcome::new(
            true,
            json!({ "total": dims_json(total), "intervals": per_interval.len() }),
            json!({ "homology": per_interval }),
        ))
    }

    fn braid_check(&self) -> Result<Outcome> {
        let poset = self.poset("poset")?;
        let delta_name = self.name("delta");
        let cb = self.model.chain_braid(&poset, delta_name)?;
        let report = cb.braid().verify_axioms();
        let failures: Vec<_> = report.failures().cloned().collect();
        let mut verdict = json!({
            "axioms_pass": report.all_pass(),
            "checks": report.checks.len(),
            "failures": failures,
        });
        let mut witnesses = Value::Null;
        let mut ok = report.all_pass();
        if let Some(g_name) = self.model.param("g") {
            let g = self.model.chain_braid(&poset, g_name)?.into_braid();
            let phi = match self.model.param("phi") {
                Some(n) => Some(self.model.morphism(&poset, n)?.0),
                None => None,
            };
            let cm = is_connection_matrix(&poset, cb.delta(), &g, phi.as_ref(), self.opts.budget)?;
            ok &= cm.is_connection_matrix;
            verdict["is_connection_matrix"] = json!(cm.is_connection_matrix);
            verdict["summands_match"] = json!(cm.summands_match);
            if let Some(w) = &cm.witness {
                witnesses = json!({ "isomorphism": morphism_to_json(w, delta_name, g_name) });
            }
        }
        Ok(Outcome::new(ok, verdict, witnesses))
    }

    fn cm_enumerate(&self) -> Result<Outcome> {
        let poset = self.poset("poset")?;
        let g_name = self.model.param("g").unwrap_or("delta");
        let g = self.model.chain_braid(&poset, g_name)?.into_braid();
        let space_name = match self.model.param("spaces") {
            Some(s) => s.to_string(),
            None => self.space_name(g_name, false)?,
        };
        let spaces = self.model.spaces(&space_name)?;
        let all = enumerate_connection_matrices(&poset, &spaces, &g, self.opts.budget)?;
        let list: Vec<_> = all
            .iter()
            .map(|m| block_to_json(m, &space_name, &space_name))
            .collect();
        Ok(Outcome::new(
            !all.is_empty(),
            json!({ "count": all.len() }),
            json!({ "connection_matrices": list }),
        ))
    }

    fn setting(&self, poset: &Poset) -> Result<TransitionSetting<F>> {
        let delta = self.model.block(self.name("delta"))?;
        let delta_prime = self.model.block(self.name("delta_prime"))?;
        match (self.model.param("phi"), self.model.param("phi_prime")) {
            (None, None) => TransitionSetting::canonical(poset, &delta, &delta_prime),
            (Some(a), Some(b)) => {
                let (phi, _, g) = self.model.morphism(poset, a)?;
                let (phi_prime, _, g_prime) = self.model.morphism(poset, b)?;
                let g = self.model.chain_braid(poset, &g)?.into_braid();
                let g_prime = self.model.chain_braid(poset, &g_prime)?.into_braid();
                TransitionSetting::new(poset, &delta, &delta_prime, g, g_prime, phi, phi_prime)
            }
            _ => Err(Error::Precondition("give both phi and phi_prime or neither".into())),
        }
    }

    fn tm_verify(&self) -> Result<Outcome> {
        let poset = self.poset("poset")?;
        let setting = self.setting(&poset)?;
        let t = self.model.block(self.name("t"))?;
        let (theta, _, _) = self.model.morphism(&poset, self.name("theta"))?;
        let chain = setting.check_chain(&t)?;
        let triangular = t.is_triangular(&poset, false);
        if !(chain && triangular) {
            return Ok(Outcome::new(
                false,
                json!({ "covers": false, "chain": chain, "triangular": triangular }),
                Value::Null,
            ));
        }
        let cover = setting.check_cover(&t, &theta)?;
        let mut verdict = json!({
            "covers": cover.covers,
            "chain": chain,
            "triangular": triangular,
            "failing_intervals": cover.failing_intervals,
        });
        let mut ok = cover.covers;
        if cover.covers && t.degree() == 0 {
            match setting.property_report(&t, &theta) {
                Ok((report, _)) => verdict["properties"] = json!(report),
                Err(Error::PropertyFailure { clause, detail }) => {
                    ok = false;
                    verdict["properties"] = json!({ "failed_clause": clause, "detail": detail });
                }
                Err(e) => return Err(e),
            }
        }
        let src = self.space_name(self.name("delta"), false)?;
        let tgt = self.space_name(self.name("delta_prime"), false)?;
        let witnesses = json!({ "induced": morphism_to_json(&cover.induced, &src, &tgt) });
        Ok(Outcome::new(ok, verdict, witnesses))
    }

    fn tm_construct(&self) -> Result<Outcome> {
        let poset = self.poset("poset")?;
        let setting = self.setting(&poset)?;
        let (theta, _, _) = self.model.morphism(&poset, self.name("theta"))?;
        let mode = self
            .opts
            .mode
            .as_deref()
            .or(self.model.param("mode"))
            .unwrap_or("trivial");
        let src = self.space_name(self.name("delta"), false)?;
        let tgt = self.space_name(self.name("delta_prime"), false)?;
        let (t, extra) = match mode {
            "trivial" => (Some(setting.construct_trivial(&theta)?), Value::Null),
            "stackable" => {
                let stack = poset
                    .find_stack()
                    .ok_or_else(|| Error::Precondition("order is not stackable".into()))?;
                let blocks = stack.blocks.clone();
                let t = setting.construct_stackable(&theta, &stack, self.opts.budget)?;
                (t, json!({ "stack": blocks }))
            }
            "degree-k" => {
                let (t, cert) = setting.construct_unique_k(&theta, self.opts.budget)?;
                (Some(t), json!({ "uniqueness": cert }))
            }
            other => return Err(Error::Precondition(format!("unknown mode {other:?}"))),
        };
        let verdict = json!({ "mode": mode, "constructed": t.is_some(), "details": extra });
        let witnesses = match &t {
            Some(t) => json!({ "t": block_to_json(t, &src, &tgt) }),
            None => Value::Null,
        };
        Ok(Outcome::new(t.is_some(), verdict, witnesses))
    }

    fn fastslow(&self) -> Result<Outcome> {
        let order_minus = self.poset("order_minus")?;
        let order_plus = self.poset("order_plus")?;
        let action = self
            .opts
            .action
            .as_deref()
            .or(self.model.param("action"))
            .unwrap_or("assemble");
        match action {
            "assemble" => {
                let sigma = self.model.suspension(self.name("sigma"))?;
                let asm = assemble_fastslow(
                    &order_minus,
                    &order_plus,
                    &self.model.block(self.name("delta_minus"))?,
                    &self.model.block(self.name("delta_plus"))?,
                    &sigma,
                    &self.model.block(self.name("t_block"))?,
                )?;
                Ok(Outcome::new(
                    true,
                    json!({ "valid": true, "style": asm.style }),
                    json!({
                        "doubled_covers": asm.doubled.covers(),
                        "doubled_labels": asm.doubled.labels(),
                        "spaces": spaces_to_json(asm.delta.source()),
                        "delta_eps": block_to_json(&asm.delta, "doubled", "doubled"),
                    }),
                ))
            }
            "extract" => {
                let sigma = match self.model.param("sigma") {
                    Some(n) => Some(self.model.suspension(n)?),
                    None => None,
                };
                let asm = FastSlowAssembly {
                    doubled: Poset::doubled(&order_minus, &order_plus)?,
                    delta: self.model.block(self.name("delta_eps"))?,
                    style: sigma.as_ref().map(|s| s.style).unwrap_or_default(),
                };
                let continuation = match self.model.param("continuation") {
                    Some(n) => Some(self.model.poset(Some(n))?),
                    None => None,
                };
                let sing = extract_singular(&asm, continuation.as_ref())?;
                let c = &sing.certificate;
                let mut ok = c.anticommutes
                    && c.invertible
                    && c.triangular != Some(false)
                    && c.connecting_iso == c.total_homology_zero;
                let mut verdict = json!({ "certificate": c });
                let mut witnesses = json!({ "t_s": block_to_json(&sing.t_s, "plus_suspended", "minus") });
                if let (Some(cont), Some(sigma)) = (&continuation, &sigma) {
                    let (t, covers) = continuation_cover(cont, &sing, sigma)?;
                    ok &= covers;
                    verdict["covers_continuation"] = json!(covers);
                    witnesses["t"] = json!(block_to_json(&t, "plus", "minus"));
                }
                Ok(Outcome::new(ok, verdict, witnesses))
            }
            other => Err(Error::Precondition(format!("unknown fastslow action {other:?}"))),
        }
    }

    fn directional(&self) -> Result<Outcome> {
        let poset = self.poset("poset")?;
        let t = self.model.block(self.name("t"))?;
        let signs = match &self.opts.signs {
            Some(s) => s.parse()?,
            None => self.model.signs(self.name("signs"))?,
        };
        let out = directional_matrix(&poset, &t, &signs)?;
        let verdict = json!({
            "signs": signs.to_string(),
            "applications": out.word.applications(),
            "palindromic": out.word.is_palindromic(),
        });
        let steps: Vec<Value> = out
            .steps
            .iter()
            .map(|(w, s)| json!({ "transform": w, "split": s }))
            .collect();
        let witnesses = json!({
            "d": block_to_json(&out.d, "out", "in"),
            "out_spaces": spaces_to_json(out.d.source()),
            "in_spaces": spaces_to_json(out.d.target()),
            "word": out.word.tokens(),
            "steps": steps,
            "labels": relabel_in_out(&poset, &signs),
            "nonzero_entries": nonzero_entry_report(&out.d),
        });
        Ok(Outcome::new(true, verdict, witnesses))
    }

    fn report(&self) -> Result<Outcome> {
        let poset = self.model.poset(None)?;
        let file = self.model.file();
        let spaces: BTreeMap<&str, Value> = file
            .spaces
            .keys()
            .map(|name| {
                let s = self.model.spaces(name)?;
                let total = GradedSpace::direct_sum(&s);
                Ok((
                    name.as_str(),
                    json!({
                        "elements": s.len(),
                        "total": dims_json(&total),
                        "euler_characteristic": total.euler_characteristic(),
                    }),
                ))
            })
            .collect::<Result<_>>()?;
        let mut matrices = BTreeMap::new();
        for (name, m) in &file.matrices {
            let mut entry = json!({ "kind": m.kind() });
            if let MatrixJson::Block(_) = m {
                let b: BlockGradedMap<F> = self.model.block(name)?;
                entry["degree"] = json!(b.degree());
                entry["nonzero_entries"] = json!(nonzero_entry_report(&b).len());
                if b.degree() == 1 && b.len() == poset.len() && b.source() == b.target() {
                    let v = validate(&poset, &b)?;
                    entry["valid"] = json!(v.is_valid());
                    if v.is_valid() {
                        let cb = ChainBraid::new(&poset, &b)?;
                        entry["homology"] = json!(dims_json(cb.braid().dims(&Interval::full(poset.len()))));
                    }
                }
            }
            matrices.insert(name.as_str(), entry);
        }
        let verdict = json!({
            "field": self.model.field().spec().to_string(),
            "poset": {
                "n": poset.len(),
                "labels": poset.labels(),
                "covers": poset.covers(),
                "intervals": poset.intervals().len() - 1,
                "adjacent_pairs": poset.adjacent_pairs().len(),
                "stackable": poset.find_stack().is_some(),
                "linear_extension": poset.linear_extension(),
            },
            "spaces": spaces,
            "matrices": matrices,
        });
        Ok(Outcome::new(true, verdict, Value::Null))
    }
}
