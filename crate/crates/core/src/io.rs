//! The JSON problem format: schema types, structural checks with JSON
//! pointers, and resolution of named objects into typed values.
//!
//! ```json
//! {
//!   "version": 1,
//!   "field": "f2",
//!   "poset": {"n": 2, "labels": ["a", "r"], "covers": [[0, 1]]},
//!   "spaces": {"C": [{"0": 1}, {"1": 1}]},
//!   "matrices": {
//!     "delta": {"kind": "block", "degree": 1, "source": "C", "target": "C",
//!               "blocks": [{"row": 0, "col": 1, "source_degree": 1, "data": [[1]]}]}
//!   },
//!   "task": {"command": "validate", "params": {"delta": "delta"}}
//! }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::block::BlockGradedMap;
use crate::braid::{BraidMorphism, ChainBraid};
use crate::directional::{Sign, SignAssignment};
use crate::error::{Error, Result};
use crate::fastslow::{SuspensionData, SuspensionStyle};
use crate::field::{parse_ratio, Field, FieldSpec};
use crate::graded::{GradedMap, GradedSpace};
use crate::matrix::Matrix;
use crate::poset::{Interval, Poset};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub field: String,
    pub poset: PosetJson,
    /// Further orders referenced by name from task parameters.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub posets: BTreeMap<String, PosetJson>,
    #[serde(default)]
    pub spaces: BTreeMap<String, Vec<BTreeMap<i32, usize>>>,
    #[serde(default)]
    pub matrices: BTreeMap<String, MatrixJson>,
    #[serde(default)]
    pub task: TaskJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetJson {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    #[serde(default)]
    pub covers: Vec<[usize; 2]>,
}

/// A matrix entry: an integer or a `"num/den"` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

pub type Rows = Vec<Vec<Scalar>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MatrixJson {
    Block(BlockJson),
    Morphism(MorphismJson),
    Suspension(SuspensionJson),
    Signs { values: Vec<Sign> },
}

impl MatrixJson {
    pub fn kind(&self) -> &'static str {
        match self {
            MatrixJson::Block(_) => "block",
            MatrixJson::Morphism(_) => "morphism",
            MatrixJson::Suspension(_) => "suspension",
            MatrixJson::Signs { .. } => "signs",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockJson {
    pub degree: i32,
    /// Name of the source spaces.
    pub source: String,
    pub target: String,
    #[serde(default)]
    pub blocks: Vec<BlockEntryJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockEntryJson {
    pub row: usize,
    pub col: usize,
    pub source_degree: i32,
    pub data: Rows,
}

/// A braid morphism between the braids generated by two named boundary
/// matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismJson {
    pub degree: i32,
    pub source: String,
    pub target: String,
    pub form: MorphismForm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphismForm {
    Identity,
    /// Induced on every interval by the named block matrix.
    Induced(String),
    Explicit(Vec<IntervalMapJson>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalMapJson {
    pub interval: Vec<usize>,
    /// Blocks keyed by source degree.
    pub blocks: BTreeMap<String, Rows>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuspensionJson {
    pub space: String,
    #[serde(default)]
    pub style: SuspensionStyle,
    pub form: SuspensionForm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuspensionForm {
    Shift,
    Explicit(Vec<BTreeMap<String, Rows>>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskJson {
    /// Command used by [`crate::cli::run_task`]; the command line overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Parse and structurally check a problem file.
pub fn parse_str(text: &str) -> Result<ProblemFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let p = pointer(e.path());
        Error::schema(p, e.into_inner().to_string())
    })?;
    check(&file)?;
    Ok(file)
}

pub fn parse_path(path: &std::path::Path) -> Result<ProblemFile> {
    parse_str(&std::fs::read_to_string(path)?)
}

pub fn to_json_string(file: &ProblemFile) -> String {
    serde_json::to_string_pretty(file).expect("problem files serialize")
}

fn check_poset(p: &PosetJson, at: &str) -> Result<Poset> {
    if !p.labels.is_empty() && p.labels.len() != p.n {
        return Err(Error::schema(
            format!("{at}/labels"),
            format!("{} labels for {} elements", p.labels.len(), p.n),
        ));
    }
    for (i, c) in p.covers.iter().enumerate() {
        for (j, &e) in c.iter().enumerate() {
            if e >= p.n {
                return Err(Error::schema(
                    format!("{at}/covers/{i}/{j}"),
                    format!("element {e} out of range for n = {}", p.n),
                ));
            }
        }
    }
    let rel: Vec<(usize, usize)> = p.covers.iter().map(|c| (c[0], c[1])).collect();
    let poset = Poset::from_relations(p.n, &rel)
        .map_err(|e| Error::schema(format!("{at}/covers"), e.to_string()))?;
    Ok(if p.labels.is_empty() { poset } else { poset.with_labels(p.labels.clone()) })
}

fn spaces_of(raw: &[BTreeMap<i32, usize>]) -> Vec<GradedSpace> {
    raw.iter()
        .map(|m| GradedSpace::from_pairs(m.iter().map(|(&k, &d)| (k, d))))
        .collect()
}

fn degree_key(key: &str, at: &str) -> Result<i32> {
    key.parse()
        .map_err(|_| Error::schema(at, format!("degree key {key:?} is not an integer")))
}

fn check_rows(rows: &Rows, want: (usize, usize), what: impl Fn() -> String) -> Result<()> {
    if rows.len() != want.0 && !(want.0 == 0 && rows.is_empty()) {
        return Err(Error::ShapeMismatch(format!(
            "{}: expected {} rows, found {}",
            what(),
            want.0,
            rows.len()
        )));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != want.1) {
        return Err(Error::ShapeMismatch(format!(
            "{}: row {i} has {} entries, expected {}",
            what(),
            r.len(),
            want.1
        )));
    }
    Ok(())
}

/// Checks everything that does not depend on the field: version, field
/// tag, orders, references and block shapes.
pub fn check(file: &ProblemFile) -> Result<()> {
    if file.version != SCHEMA_VERSION {
        return Err(Error::schema("/version", format!("unsupported version {}", file.version)));
    }
    file.field
        .parse::<FieldSpec>()
        .map_err(|e| Error::schema("/field", e.to_string()))?;
    check_poset(&file.poset, "/poset")?;
    for (name, p) in &file.posets {
        check_poset(p, &format!("/posets/{name}"))?;
    }
    for (name, m) in &file.matrices {
        let at = format!("/matrices/{name}");
        let space = |s: &str, field: &str| {
            file.spaces
                .get(s)
                .map(|v| spaces_of(v))
                .ok_or_else(|| Error::schema(format!("{at}/{field}"), format!("unknown space {s:?}")))
        };
        let boundary = |s: &str, field: &str| match file.matrices.get(s) {
            Some(MatrixJson::Block(_)) => Ok(()),
            _ => Err(Error::schema(
                format!("{at}/{field}"),
                format!("{s:?} is not a block matrix"),
            )),
        };
        match m {
            MatrixJson::Block(b) => {
                let src = space(&b.source, "source")?;
                let tgt = space(&b.target, "target")?;
                if src.len() != tgt.len() {
                    return Err(Error::ShapeMismatch(format!(
                        "matrix {name:?}: source has {} elements, target {}",
                        src.len(),
                        tgt.len()
                    )));
                }
                for (idx, e) in b.blocks.iter().enumerate() {
                    for (key, v) in [("row", e.row), ("col", e.col)] {
                        if v >= src.len() {
                            return Err(Error::schema(
                                format!("{at}/blocks/{idx}/{key}"),
                                format!("element {v} out of range"),
                            ));
                        }
                    }
                    let want = (tgt[e.row].dim(e.source_degree - b.degree), src[e.col].dim(e.source_degree));
                    check_rows(&e.data, want, || {
                        format!(
                            "matrix {name:?} block {idx} (row {}, col {}, source degree {})",
                            e.row, e.col, e.source_degree
                        )
                    })?;
                }
            }
            MatrixJson::Morphism(mj) => {
                boundary(&mj.source, "source")?;
                boundary(&mj.target, "target")?;
                if let MorphismForm::Induced(t) = &mj.form {
                    boundary(t, "form/induced")?;
                }
            }
            MatrixJson::Suspension(s) => {
                let sp = space(&s.space, "space")?;
                if let SuspensionForm::Explicit(maps) = &s.form {
                    if maps.len() != sp.len() {
                        return Err(Error::ShapeMismatch(format!(
                            "suspension {name:?}: {} maps for {} elements",
                            maps.len(),
                            sp.len()
                        )));
                    }
                    for (p, blocks) in maps.iter().enumerate() {
                        for (key, rows) in blocks {
                            let k = degree_key(key, &format!("{at}/form/explicit/{p}"))?;
                            let d = sp[p].dim(k);
                            check_rows(rows, (d, d), || {
                                format!("suspension {name:?} element {p} degree {k}")
                            })?;
                        }
                    }
                }
            }
            MatrixJson::Signs { .. } => {}
        }
    }
    for (key, value) in &file.task.params {
        let found = match key.as_str() {
            "poset" | "order_minus" | "order_plus" | "continuation" => {
                value == "main" || file.posets.contains_key(value)
            }
            "spaces" => file.spaces.contains_key(value),
            "delta" | "delta_prime" | "t" | "theta" | "phi" | "phi_prime" | "g" | "sigma"
            | "t_block" | "delta_minus" | "delta_plus" | "delta_eps" | "signs" => {
                file.matrices.contains_key(value)
            }
            _ => true,
        };
        if !found {
            return Err(Error::schema(
                format!("/task/params/{key}"),
                format!("unknown name {value:?}"),
            ));
        }
    }
    Ok(())
}

/// A checked problem file bound to a coefficient field.
#[derive(Clone, Debug)]
pub struct Model<F: Field> {
    field: F,
    file: ProblemFile,
    poset: Poset,
}

impl<F: Field> Model<F> {
    pub fn new(field: F, file: ProblemFile) -> Result<Self> {
        check(&file)?;
        let poset = check_poset(&file.poset, "/poset")?;
        Ok(Model { field, file, poset })
    }

    pub fn field(&self) -> F {
        self.field
    }

    pub fn file(&self) -> &ProblemFile {
        &self.file
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.file.task.params.get(key).map(String::as_str)
    }

    /// The named order; `None` or `"main"` is the top-level poset.
    pub fn poset(&self, name: Option<&str>) -> Result<Poset> {
        match name {
            None | Some("main") => Ok(self.poset.clone()),
            Some(n) => {
                let p = self
                    .file
                    .posets
                    .get(n)
                    .ok_or_else(|| Error::schema("/posets", format!("unknown poset {n:?}")))?;
                check_poset(p, &format!("/posets/{n}"))
            }
        }
    }

    pub fn spaces(&self, name: &str) -> Result<Vec<GradedSpace>> {
        self.file
            .spaces
            .get(name)
            .map(|v| spaces_of(v))
            .ok_or_else(|| Error::schema("/spaces", format!("unknown space {name:?}")))
    }

    fn raw(&self, name: &str) -> Result<&MatrixJson> {
        self.file
            .matrices
            .get(name)
            .ok_or_else(|| Error::schema("/matrices", format!("unknown matrix {name:?}")))
    }

    fn scalar(&self, s: &Scalar, at: &str) -> Result<F::Elem> {
        let bad = || Error::schema(at, format!("invalid entry {s:?}"));
        match s {
            Scalar::Int(v) => Ok(self.field.from_i64(*v)),
            Scalar::Text(t) => {
                let (n, d) = parse_ratio(t).ok_or_else(bad)?;
                self.field.from_ratio(&n, &d).ok_or_else(bad)
            }
        }
    }

    fn matrix(&self, rows: &Rows, shape: (usize, usize), at: &str) -> Result<Matrix<F>> {
        let mut data = Vec::with_capacity(shape.0 * shape.1);
        for (i, r) in rows.iter().enumerate() {
            for (j, s) in r.iter().enumerate() {
                data.push(self.scalar(s, &format!("{at}/{i}/{j}"))?);
            }
        }
        Ok(Matrix::from_vec(self.field, shape.0, shape.1, data))
    }

    pub fn block_json(&self, name: &str) -> Result<&BlockJson> {
        match self.raw(name)? {
            MatrixJson::Block(b) => Ok(b),
            other => Err(Error::schema(
                format!("/matrices/{name}/kind"),
                format!("expected a block matrix, found {}", other.kind()),
            )),
        }
    }

    pub fn block(&self, name: &str) -> Result<BlockGradedMap<F>> {
        let b = self.block_json(name)?;
        let src = self.spaces(&b.source)?;
        let tgt = self.spaces(&b.target)?;
        let mut out = BlockGradedMap::zero(self.field, b.degree, src.clone(), tgt.clone());
        for (idx, e) in b.blocks.iter().enumerate() {
            let shape = (tgt[e.row].dim(e.source_degree - b.degree), src[e.col].dim(e.source_degree));
            let at = format!("/matrices/{name}/blocks/{idx}/data");
            let m = self.matrix(&e.data, shape, &at)?;
            let mut entry = out.entry(e.row, e.col);
            entry.set_block(e.source_degree, entry.block(e.source_degree).add(&m))?;
            out.set_entry(e.row, e.col, entry)?;
        }
        Ok(out)
    }

    pub fn chain_braid(&self, poset: &Poset, name: &str) -> Result<ChainBraid<F>> {
        ChainBraid::new(poset, &self.block(name)?)
    }

    /// A morphism with the names of the boundary matrices generating its
    /// source and target braids.
    pub fn morphism(&self, poset: &Poset, name: &str) -> Result<(BraidMorphism<F>, String, String)> {
        let MatrixJson::Morphism(m) = self.raw(name)? else {
            return Err(Error::schema(format!("/matrices/{name}/kind"), "expected a morphism"));
        };
        let src = self.chain_braid(poset, &m.source)?;
        let tgt = if m.target == m.source { src.clone() } else { self.chain_braid(poset, &m.target)? };
        let morphism = match &m.form {
            MorphismForm::Identity => {
                if src.braid().all_dims() != tgt.braid().all_dims() || m.degree != 0 {
                    return Err(Error::ShapeMismatch(format!(
                        "identity morphism {name:?} between different braids"
                    )));
                }
                BraidMorphism::identity(src.braid())
            }
            MorphismForm::Induced(t) => {
                let t = self.block(t)?;
                if t.degree() != m.degree {
                    return Err(Error::ShapeMismatch(format!(
                        "morphism {name:?} has degree {} but its matrix has degree {}",
                        m.degree,
                        t.degree()
                    )));
                }
                BraidMorphism::induced(&t, &src, &tgt)?
            }
            MorphismForm::Explicit(list) => {
                let mut maps = BTreeMap::new();
                for i in src.braid().intervals() {
                    maps.insert(
                        i.clone(),
                        GradedMap::zero(self.field, m.degree, src.braid().dims(&i).clone(), tgt.braid().dims(&i).clone()),
                    );
                }
                for (idx, im) in list.iter().enumerate() {
                    let at = format!("/matrices/{name}/form/explicit/{idx}");
                    let i = Interval::new(im.interval.clone());
                    if i.is_empty() || !poset.is_interval(i.members()) {
                        return Err(Error::schema(format!("{at}/interval"), "not a nonempty interval"));
                    }
                    let s = src.braid().dims(&i).clone();
                    let t = tgt.braid().dims(&i).clone();
                    let mut blocks = BTreeMap::new();
                    for (key, rows) in &im.blocks {
                        let k = degree_key(key, &format!("{at}/blocks"))?;
                        let shape = (t.dim(k - m.degree), s.dim(k));
                        check_rows(rows, shape, || format!("morphism {name:?} on {i} degree {k}"))?;
                        blocks.insert(k, self.matrix(rows, shape, &format!("{at}/blocks/{k}"))?);
                    }
                    maps.insert(i, GradedMap::new(self.field, m.degree, s, t, blocks)?);
                }
                BraidMorphism::new(m.degree, maps)?
            }
        };
        Ok((morphism, m.source.clone(), m.target.clone()))
    }

    pub fn suspension(&self, name: &str) -> Result<SuspensionData<F>> {
        let MatrixJson::Suspension(s) = self.raw(name)? else {
            return Err(Error::schema(format!("/matrices/{name}/kind"), "expected a suspension"));
        };
        let spaces = self.spaces(&s.space)?;
        match &s.form {
            SuspensionForm::Shift => Ok(SuspensionData::shift(self.field, &spaces, s.style)),
            SuspensionForm::Explicit(list) => {
                let mut maps = Vec::new();
                for (p, (sp, blocks)) in spaces.iter().zip(list).enumerate() {
                    let mut mats = BTreeMap::new();
                    for (key, rows) in blocks {
                        let k = degree_key(key, &format!("/matrices/{name}/form/explicit/{p}"))?;
                        let d = sp.dim(k);
                        let at = format!("/matrices/{name}/form/explicit/{p}/{k}");
                        mats.insert(k, self.matrix(rows, (d, d), &at)?);
                    }
                    maps.push(GradedMap::new(self.field, -1, sp.clone(), sp.shift(1), mats)?);
                }
                SuspensionData::new(s.style, maps)
            }
        }
    }

    pub fn signs(&self, name: &str) -> Result<SignAssignment> {
        match self.raw(name)? {
            MatrixJson::Signs { values } => Ok(SignAssignment(values.clone())),
            _ => Err(Error::schema(format!("/matrices/{name}/kind"), "expected signs")),
        }
    }

    /// Name of a space list equal to `spaces`, if the file has one.
    pub fn space_name(&self, spaces: &[GradedSpace]) -> Option<String> {
        self.file
            .spaces
            .iter()
            .find(|(_, v)| spaces_of(v) == spaces)
            .map(|(k, _)| k.clone())
    }
}

pub fn scalar_of<F: Field>(field: F, a: &F::Elem) -> Scalar {
    match field.to_json(a) {
        serde_json::Value::Number(n) => Scalar::Int(n.as_i64().expect("small integer")),
        other => Scalar::Text(other.as_str().unwrap_or_default().to_string()),
    }
}

pub fn rows_of<F: Field>(m: &Matrix<F>) -> Rows {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| scalar_of(m.field(), m.get(i, j))).collect())
        .collect()
}

/// The block-matrix form of a map, with nonzero blocks only.
pub fn block_to_json<F: Field>(m: &BlockGradedMap<F>, source: &str, target: &str) -> BlockJson {
    let mut blocks = Vec::new();
    for (&(row, col), e) in m.entries() {
        for (&k, b) in e.blocks() {
            if !b.is_zero() {
                blocks.push(BlockEntryJson {
                    row,
                    col,
                    source_degree: k,
                    data: rows_of(b),
                });
            }
        }
    }
    BlockJson {
        degree: m.degree(),
        source: source.to_string(),
        target: target.to_string(),
        blocks,
    }
}

/// The explicit form of a braid morphism.
pub fn morphism_to_json<F: Field>(m: &BraidMorphism<F>, source: &str, target: &str) -> MorphismJson {
    let list = m
        .maps()
        .iter()
        .map(|(i, g)| IntervalMapJson {
            interval: i.members().to_vec(),
            blocks: g.blocks().iter().map(|(k, b)| (k.to_string(), rows_of(b))).collect(),
        })
        .collect();
    MorphismJson {
        degree: m.degree(),
        source: source.to_string(),
        target: target.to_string(),
        form: MorphismForm::Explicit(list),
    }
}

pub fn spaces_to_json(spaces: &[GradedSpace]) -> Vec<BTreeMap<i32, usize>> {
    spaces.iter().map(|s| s.iter().collect()).collect()
}
